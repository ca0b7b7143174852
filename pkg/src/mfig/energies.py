"""Energy functionals on the positive orthant with exact derivatives.

Every energy is defined on all of ``R_+^n`` (not just the simplex), so that
``gradient`` and ``hessian`` are plain Euclidean partials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, InvalidArgumentError


def _as_point(p, n: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise InvalidArgumentError(f"expected a vector, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise InvalidArgumentError(f"dimension mismatch: energy has n={n}, point has {p.shape[0]}")
    return p


@dataclass(frozen=True)
class EntropyKind:
    """Scalar convex density ``U`` together with ``U'`` and ``U''``."""

    name: str
    U: Callable[[np.ndarray], np.ndarray]
    dU: Callable[[np.ndarray], np.ndarray]
    d2U: Callable[[np.ndarray], np.ndarray]
    # True when U' blows up at 0, so gradients are only defined on the open orthant.
    singular_at_zero: bool = False


def _shannon_dU(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("Shannon entropy gradient needs strictly positive probabilities")
    return np.log(x) + 1.0


def _shannon_d2U(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("Shannon entropy Hessian needs strictly positive probabilities")
    return 1.0 / x


SHANNON = EntropyKind("shannon", lambda x: xlogy(x, x), _shannon_dU, _shannon_d2U, True)
QUADRATIC = EntropyKind(
    "quadratic",
    lambda x: 0.5 * np.asarray(x, dtype=float) ** 2,
    lambda x: np.asarray(x, dtype=float),
    lambda x: np.ones_like(np.asarray(x, dtype=float)),
)


def custom_entropy(U, dU, d2U, name: str = "custom", check: bool = True) -> EntropyKind:
    """Wrap user-supplied ``U, U', U''``; convexity is sampled on (0, 1)."""
    kind = EntropyKind(name, U, dU, d2U)
    if check:
        xs = np.linspace(1e-3, 1 - 1e-3, 257)
        if np.min(d2U(xs)) < -1e-12:
            raise InvalidArgumentError(f"entropy density {name!r} is not convex on (0, 1)")
    return kind


class Energy:
    """Base class.  ``n`` is ``None`` for energies defined in every dimension."""

    n: int | None = None
    kind: str = "abstract"

    def value(self, p) -> float:
        raise NotImplementedError

    def gradient(self, p) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, p) -> np.ndarray:
        raise NotImplementedError

    def is_separable(self) -> bool:
        """True when ``dE/dp_i`` depends on ``p_i`` alone."""
        return True

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Linear(Energy):
    V: np.ndarray
    kind: str = field(default="linear", init=False)

    def __post_init__(self):
        object.__setattr__(self, "V", np.array(self.V, dtype=float).ravel())

    @property
    def n(self):
        return self.V.shape[0]

    def value(self, p):
        return float(self.V @ _as_point(p, self.n))

    def gradient(self, p):
        _as_point(p, self.n)
        return self.V.copy()

    def hessian(self, p):
        _as_point(p, self.n)
        return np.zeros((self.n, self.n))

    def to_config(self):
        return {"kind": "linear", "V": self.V.tolist()}


@dataclass(frozen=True, eq=False)
class Interaction(Energy):
    W: np.ndarray
    kind: str = field(default="interaction", init=False)

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InvalidArgumentError(f"W must be square, got shape {W.shape}")
        if not np.array_equal(W, W.T):
            raise InvalidArgumentError("interaction matrix W must be symmetric")
        object.__setattr__(self, "W", W)

    @property
    def n(self):
        return self.W.shape[0]

    def value(self, p):
        p = _as_point(p, self.n)
        return float(0.5 * p @ self.W @ p)

    def gradient(self, p):
        return self.W @ _as_point(p, self.n)

    def hessian(self, p):
        _as_point(p, self.n)
        return self.W.copy()

    def is_separable(self):
        off = self.W - np.diag(np.diag(self.W))
        return not np.any(off)

    def to_config(self):
        return {"kind": "interaction", "W": self.W.tolist()}


@dataclass(frozen=True, eq=False)
class Entropy(Energy):
    U: EntropyKind = SHANNON
    kind: str = field(default="entropy", init=False)

    def value(self, p):
        p = _as_point(p)
        if np.any(p < 0.0):
            raise DomainError("entropy energy needs nonnegative probabilities")
        return float(np.sum(self.U.U(p)))

    def gradient(self, p):
        return np.asarray(self.U.dU(_as_point(p)), dtype=float)

    def hessian(self, p):
        return np.diag(np.asarray(self.U.d2U(_as_point(p)), dtype=float))

    def to_config(self):
        return {"kind": "entropy", "U": self.U.name}


@dataclass(frozen=True, eq=False)
class Sum(Energy):
    parts: tuple
    kind: str = field(default="sum", init=False)

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InvalidArgumentError("a sum energy needs at least one part")
        dims = {e.n for e in parts if e.n is not None}
        if len(dims) > 1:
            raise InvalidArgumentError(f"sum parts disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self):
        dims = [e.n for e in self.parts if e.n is not None]
        return dims[0] if dims else None

    def value(self, p):
        return float(sum(e.value(p) for e in self.parts))

    def gradient(self, p):
        return sum(e.gradient(p) for e in self.parts)

    def hessian(self, p):
        return sum(e.hessian(p) for e in self.parts)

    def is_separable(self):
        return all(e.is_separable() for e in self.parts)

    def to_config(self):
        return {"kind": "sum", "parts": [e.to_config() for e in self.parts]}


def shannon() -> Entropy:
    """Negative Boltzmann-Shannon entropy ``sum p_i log p_i``."""
    return Entropy(SHANNON)


_ENTROPIES = {"shannon": SHANNON, "quadratic": QUADRATIC}


def energy_from_config(cfg) -> Energy:
    """Build an energy from its JSON-style config (a dict or the string ``"shannon"``)."""
    if isinstance(cfg, str):
        if cfg in _ENTROPIES:
            return Entropy(_ENTROPIES[cfg])
        raise InvalidArgumentError(f"unknown energy {cfg!r}")
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise InvalidArgumentError(f"energy config must be an object with a 'kind' field, got {cfg!r}")
    kind = cfg["kind"]
    try:
        if kind == "linear":
            return Linear(cfg["V"])
        if kind == "interaction":
            return Interaction(cfg["W"])
        if kind == "entropy":
            name = cfg.get("U", "shannon")
            if name not in _ENTROPIES:
                raise InvalidArgumentError(f"unknown entropy density {name!r}")
            return Entropy(_ENTROPIES[name])
        if kind == "sum":
            return Sum(tuple(energy_from_config(c) for c in cfg["parts"]))
    except KeyError as exc:
        raise InvalidArgumentError(f"energy config of kind {kind!r} is missing field {exc}") from None
    raise InvalidArgumentError(f"unknown energy kind {kind!r}")


def value(e: Energy, p) -> float:
    return e.value(p)


def gradient(e: Energy, p) -> np.ndarray:
    return e.gradient(p)


def second_partials(e: Energy, p) -> np.ndarray:
    return e.hessian(p)


def restrict_two_point(e: Energy, x: float, xc: float | None = None):
    """Value and first two derivatives of ``phi(x) = E(x, 1-x)``.

    ``xc`` may carry an accurately computed ``1 - x``.
    """
    xc = 1.0 - x if xc is None else xc
    p = np.array([x, xc])
    g = e.gradient(p)
    h = e.hessian(p)
    return e.value(p), g[0] - g[1], h[0, 0] - 2.0 * h[0, 1] + h[1, 1]
