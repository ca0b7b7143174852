"""C4-property, Cartesian-product curvature bound and the hypercube bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import global_curvature
from .energies import Energy, Entropy
from .errors import InvalidArgumentError, PreconditionError
from .gamma import build_context, gamma2, gamma2_edges_sum
from .graphs import Graph, build_standard, cartesian_product
from .means import Mean
from .search import SearchConfig

C4 = build_standard("cycle_n", 4)


def compatibility_defect(mean: Mean, energy: Energy, samples: int = 1000, seed: int = 0) -> float:
    """Largest ``|theta(p_i, p_j)(d_i E - d_j E) - (p_i - p_j)|`` on random 4-point states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in rng.dirichlet(np.ones(4), size=samples):
        g = energy.gradient(p)
        for i, j in C4.edges:
            worst = max(worst, abs(float(mean(p[i], p[j])) * (g[i] - g[j]) - (p[i] - p[j])))
    return worst


def regrouping_identity(theta_cycle, f) -> tuple[float, float]:
    """Both sides of the C4 regrouping identity.

    ``theta_cycle[i]`` is the weight of edge ``(i, i+1)`` around the cycle.
    """
    th = np.asarray(theta_cycle, dtype=float)
    f = np.asarray(f, dtype=float)
    lhs = 0.0
    for i in range(4):
        nxt, prv, opp = (i + 1) % 4, (i - 1) % 4, (i + 2) % 4
        # theta_{i+2, i-1} is the edge opposite to (i, i+1)
        lhs += (f[i] - f[nxt]) ** 2 * (-th[i] + th[opp])
        lhs += 2.0 * (f[i] - f[prv]) * (f[i] - f[nxt]) * (th[prv] + th[i])
    rhs = th.sum() * (f[0] - f[1] + f[2] - f[3]) ** 2
    return lhs, rhs


def c4_gap_closed_form(mean: Mean, p, f) -> float:
    """C4 gap for a compatible pair, through the Erbar-Maas coefficients.

    Equals ``1/2 sum_i c_i (f_i - f_{i+1})^2 + 1/2 (sum theta)(f_1 - f_2 + f_3 - f_4)^2`` with
    ``c_i = p_{i-1} d_1 theta(p_i, p_{i+1}) + p_{i+2} d_2 theta(p_i, p_{i+1}) - theta(p_{i-1}, p_{i+2})``.
    """
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    total = 0.0
    th_sum = 0.0
    for i in range(4):
        nxt, prv, opp = (i + 1) % 4, (i - 1) % 4, (i + 2) % 4
        c = (p[prv] * float(mean.d1(p[i], p[nxt])) + p[opp] * float(mean.d2(p[i], p[nxt]))
             - float(mean(p[prv], p[opp])))
        total += 0.5 * c * (f[i] - f[nxt]) ** 2
        th_sum += float(mean(p[i], p[nxt]))
    return total + 0.5 * th_sum * (f[0] - f[1] + f[2] - f[3]) ** 2


@dataclass
class C4PropertyReport:
    samples: int
    worst_gap: float
    worst_identity_error: float
    worst_closed_form_error: float
    compatibility_defect: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def c4_gap(mean: Mean, energy: Energy, p, f) -> float:
    """``Gamma_2^{C4}(f, f) - sum over cycle edges of the single-edge terms``."""
    ctx = build_context(C4, mean, energy, p)
    return gamma2(ctx, f, "F1") - gamma2_edges_sum(ctx, f)


def c4_property_check(mean: Mean, energy: Energy, samples: int = 10000, seed: int = 0,
                      tol: float = 1e-9, compat_tol: float = 1e-10) -> C4PropertyReport:
    """Sample the C4 gap on random states and potentials."""
    defect = compatibility_defect(mean, energy, min(samples, 1000), seed)
    if defect > compat_tol:
        raise PreconditionError(f"mean is not compatible with the energy (defect {defect:.3g})")
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.ones(4), size=samples)
    F = rng.standard_normal((samples, 4))
    TH = rng.random((samples, 4))
    worst_gap = math.inf
    worst_id = 0.0
    worst_cf = 0.0
    for p, f, th in zip(P, F, TH):
        if np.min(p) < 1e-9:
            continue
        gap = c4_gap(mean, energy, p, f)
        worst_gap = min(worst_gap, gap)
        cf = c4_gap_closed_form(mean, p, f)
        worst_cf = max(worst_cf, abs(cf - gap) / max(1.0, abs(gap)))
        lhs, rhs = regrouping_identity(th, f)
        worst_id = max(worst_id, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return C4PropertyReport(samples, float(worst_gap), float(worst_id), float(worst_cf), float(defect),
                            bool(worst_gap >= -tol))


# -- products -----------------------------------------------------------------

def product_energy(energy: Energy, n: int, explicit: Energy | None = None) -> Energy:
    """Energy on the product simplex: entropies extend as is, others must be supplied."""
    if explicit is not None:
        if explicit.n not in (None, n):
            raise InvalidArgumentError(f"product energy has dimension {explicit.n}, expected {n}")
        return explicit
    if isinstance(energy, Entropy):
        return energy
    raise InvalidArgumentError(
        f"energy kind {energy.kind!r} has no canonical product form; pass the product energy explicitly")


@dataclass
class ProductBoundReport:
    kappa_product: float
    kappa_g: float
    kappa_h: float
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        enc = (lambda v: "-inf" if v == -math.inf else v)
        return {"kappa_product": enc(self.kappa_product), "kappa_g": enc(self.kappa_g),
                "kappa_h": enc(self.kappa_h), "slack": self.slack, "pass": self.passed}


def product_bound_check(g: Graph, h: Graph, mean: Mean, energy: Energy,
                        energy_g: Energy | None = None, energy_h: Energy | None = None,
                        energy_product: Energy | None = None,
                        search: SearchConfig | None = None, tol: float = 1e-6) -> ProductBoundReport:
    """``kappa_0(G x H) >= min(kappa_0(G), kappa_0(H))`` with all three computed numerically."""
    gh = cartesian_product(g, h)
    eg = product_energy(energy, g.n, energy_g)
    eh = product_energy(energy, h.n, energy_h)
    ep = product_energy(energy, gh.n, energy_product)
    kg = global_curvature(g, mean, eg, search).kappa0
    kh = global_curvature(h, mean, eh, search).kappa0
    kp = global_curvature(gh, mean, ep, search).kappa0
    floor = min(kg, kh)
    slack = kp - floor if math.isfinite(floor) else math.inf
    return ProductBoundReport(kp, kg, kh, slack, slack >= -tol)


def c4_copies(g: Graph, h: Graph):
    """Vertex 4-tuples (cycle order) of every square ``u1u2 x v1v2`` in the product labels."""
    m = h.n
    for u1, u2 in g.edges:
        for v1, v2 in h.edges:
            yield (u1 * m + v1, u2 * m + v1, u2 * m + v2, u1 * m + v2)


def product_decomposition(g: Graph, h: Graph, mean: Mean, energy: Energy, p, f):
    """Full Gamma-two on G x H against the sum of fibre terms and square corrections.

    Returns ``(full, fibres, corrections)``; ``full == fibres + corrections``.
    """
    gh = cartesian_product(g, h)
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    m = h.n
    g_edges = [(u1 * m + v, u2 * m + v) for u1, u2 in g.edges for v in range(h.n)]
    h_edges = [(u * m + v1, u * m + v2) for u in range(g.n) for v1, v2 in h.edges]
    full = gamma2(build_context(gh, mean, energy, p), f, "F1")
    fibres = (gamma2(build_context(gh.subgraph_edges(g_edges), mean, energy, p), f, "F1")
              + gamma2(build_context(gh.subgraph_edges(h_edges), mean, energy, p), f, "F1"))
    corr = 0.0
    for a, b, c, d in c4_copies(g, h):
        sq = gh.subgraph_edges([(a, b), (b, c), (c, d), (a, d)])
        ctx = build_context(sq, mean, energy, p)
        corr += gamma2(ctx, f, "F1") - gamma2_edges_sum(ctx, f)
    return full, fibres, corr
