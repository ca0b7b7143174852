"""Analysis on the two-point graph parametrised by ``x -> (x, 1 - x)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import global_curvature
from .energies import Energy, restrict_two_point
from .errors import BoundaryError, DivergenceError, InvalidArgumentError
from .graphs import build_standard
from .means import Mean, TransportInformation
from .quadrature import integrate_unit
from .search import SearchConfig

K2 = build_standard("K_n", 2)


@dataclass(frozen=True, eq=False)
class TwoPointProblem:
    mean: Mean
    energy: Energy

    def __post_init__(self):
        if self.energy.n not in (None, 2):
            raise InvalidArgumentError(f"two-point energy must have n = 2, got {self.energy.n}")

    def is_symmetric(self, samples: int = 101, tol: float = 1e-12) -> bool:
        for x in np.linspace(0.0, 0.5, samples):
            a = self.energy.value(np.array([x, 1.0 - x]))
            b = self.energy.value(np.array([1.0 - x, x]))
            if abs(a - b) > tol * max(1.0, abs(a)):
                return False
        return True

    def require_symmetric(self):
        if not self.is_symmetric():
            raise InvalidArgumentError("this result needs a symmetric energy E(x, 1-x) = E(1-x, x)")

    def phi(self, x: float) -> float:
        return self.energy.value(np.array([x, 1.0 - x]))

    def energy_gap(self) -> float:
        """``E(1, 0) - E(1/2, 1/2)``."""
        return self.energy.value(np.array([1.0, 0.0])) - self.phi(0.5)


def kappa_k2(prob: TwoPointProblem, x: float, margin: float = 1e-9) -> float:
    """Two-point curvature from the closed expression in ``theta`` and ``E``."""
    if not margin < x < 1.0 - margin:
        raise BoundaryError(f"x = {x} is within {margin} of the boundary")
    xc = 1.0 - x
    m = prob.mean
    dth = float(m.d1(x, xc)) - float(m.d2(x, xc))
    th = float(m(x, xc))
    _, dphi, d2phi = restrict_two_point(prob.energy, x, xc)
    return 0.5 * dth * dphi + th * d2phi


def kappa_grid(prob: TwoPointProblem, points: int, margin: float = 1e-3):
    """``(x, kappa(x))`` on an even grid of ``[margin, 1 - margin]``."""
    xs = np.linspace(margin, 1.0 - margin, points)
    return xs, np.array([kappa_k2(prob, float(x)) for x in xs])


def transport_distance(prob: TwoPointProblem, x1: float, x2: float, tol: float = 1e-9) -> float:
    """``int_{x1}^{x2} theta(x, 1-x)^(-1/2) dx``."""
    if not 0.0 <= x1 <= x2 <= 1.0:
        raise InvalidArgumentError(f"need 0 <= x1 <= x2 <= 1, got ({x1}, {x2})")
    m = prob.mean

    def integrand(x, xc):
        return 1.0 / np.sqrt(np.asarray(m(x, xc), dtype=float))

    return integrate_unit(integrand, x1, x2, tol)


def kappa_min_upper_bound(prob: TwoPointProblem, distance: float | None = None) -> float:
    """``8 (E(1,0) - E(1/2,1/2)) / d^2`` with ``d`` the (0,1) distance."""
    prob.require_symmetric()
    d = transport_distance(prob, 0.0, 1.0) if distance is None else distance
    return 8.0 * prob.energy_gap() / d**2


@dataclass
class EffectivenessReport:
    efct: float
    kappa_min: float
    distance: float
    upper_bound: float

    def to_dict(self) -> dict:
        enc = (lambda v: "-inf" if v == -math.inf else v)
        return {
            "efct": enc(self.efct),
            "kappa_min": enc(self.kappa_min),
            "distance": self.distance,
            "upper_bound": self.upper_bound,
        }


def effectiveness(prob: TwoPointProblem, kappa_min: float | None = None,
                  search: SearchConfig | None = None) -> EffectivenessReport:
    """Ratio of the global curvature bound to its distance-normalised optimum.

    ``kappa_min`` defaults to the global search on the two-point graph; a
    divergent bound propagates as ``-inf``.
    """
    prob.require_symmetric()
    if kappa_min is None:
        kappa_min = global_curvature(K2, prob.mean, prob.energy, search).kappa0
    d = transport_distance(prob, 0.0, 1.0)
    bound = kappa_min_upper_bound(prob, d)
    efct = -math.inf if kappa_min == -math.inf else kappa_min / bound
    return EffectivenessReport(efct, kappa_min, d, bound)


def constant_curvature_distance(prob: TwoPointProblem, x1: float, x2: float,
                                constant: float | None = None) -> float:
    """Closed-form distance for the transport information mean with constant ``C``."""
    if constant is None:
        if not isinstance(prob.mean, TransportInformation):
            raise InvalidArgumentError("pass the constant or use a transport information mean")
        constant = prob.mean.constant
    if not 0.0 <= x1 <= 1.0 or not 0.0 <= x2 <= 1.0:
        raise InvalidArgumentError("points must lie in [0, 1]")
    x1, x2 = min(x1, x2), max(x1, x2)
    base = prob.phi(0.5)
    r1 = math.sqrt(max(prob.phi(x1) - base, 0.0))
    r2 = math.sqrt(max(prob.phi(x2) - base, 0.0))
    scale = math.sqrt(2.0 / constant)
    if x2 <= 0.5 or x1 >= 0.5:
        return scale * abs(r1 - r2)
    return scale * (r1 + r2)


__all__ = [
    "TwoPointProblem", "kappa_k2", "kappa_grid", "transport_distance",
    "kappa_min_upper_bound", "effectiveness", "EffectivenessReport",
    "constant_curvature_distance", "DivergenceError", "K2",
]
