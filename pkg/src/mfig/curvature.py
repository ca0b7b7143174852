"""Local and global Ricci curvature bounds from the Gamma-two coefficient matrix.

The local bound at ``p`` is the smallest eigenvalue of
``L(A) alpha = kappa L(Theta) alpha`` on the complement of constants, where
``A`` holds the Gamma-two coefficients ``a_ij`` (not the graph adjacency).
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .energies import Energy
from .errors import DisconnectedGraphError, InvalidArgumentError
from .gamma import GammaContext, build_context, gamma2_matrix
from .graphs import Graph, laplacian
from .means import Mean
from .search import SearchConfig, minimize_over_simplex, simplex_samples

NEAR_SINGULAR_COND = 1e12
DIVERGENCE_MARGINS = (1e-3, 1e-4, 1e-5)


@functools.lru_cache(maxsize=64)
def complement_basis(n: int) -> np.ndarray:
    """Orthonormal basis (``n x (n-1)``) of the vectors orthogonal to ``1``.

    Columns 2..n of the Householder reflector sending ``e_1`` to ``1/sqrt(n)``.
    """
    if n < 2:
        return np.zeros((n, 0))
    v = np.full(n, 1.0 / math.sqrt(n))
    u = -v
    u[0] += 1.0
    u /= np.linalg.norm(u)
    h = np.eye(n) - 2.0 * np.outer(u, u)
    q = np.ascontiguousarray(h[:, 1:])
    q.setflags(write=False)
    return q


@dataclass
class CurvatureReport:
    p: np.ndarray
    kappa_local: float
    eigenvector: np.ndarray
    pairs: list
    condition_flag: str
    residual: float

    def to_dict(self) -> dict:
        return {
            "p": self.p.tolist(),
            "kappa_local": self.kappa_local,
            "pairs": [{"kappa": k, "alpha": a.tolist()} for k, a in self.pairs],
            "condition_flag": self.condition_flag,
            "residual": self.residual,
        }


def _normalise_sign(a: np.ndarray) -> np.ndarray:
    a = a / np.linalg.norm(a)
    k = int(np.argmax(np.abs(a) > np.max(np.abs(a)) * (1 - 1e-9)))
    return -a if a[k] < 0 else a


def local_curvature(ctx: GammaContext) -> CurvatureReport:
    """All ``n-1`` relative eigenpairs of ``L(A)`` with respect to ``L(Theta)``."""
    g = ctx.graph
    if g.n < 2:
        raise InvalidArgumentError("curvature needs at least two vertices")
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected; L(Theta) is singular on the complement of constants")
    i, j, _ = g.edge_arrays()
    if np.any(ctx.theta[i, j] <= 0.0):
        raise InvalidArgumentError("mean must be strictly positive on every edge")
    la = laplacian(gamma2_matrix(ctx), allow_negative=True)
    lt = laplacian(ctx.theta)
    q = complement_basis(g.n)
    ra = q.T @ la @ q
    rt = q.T @ lt @ q
    ra = 0.5 * (ra + ra.T)
    rt = 0.5 * (rt + rt.T)
    w, v = eigh(ra, rt)
    tw = np.linalg.eigvalsh(rt)
    flag = "ok" if tw[0] > 0 and tw[-1] / tw[0] < NEAR_SINGULAR_COND else "near_singular"
    vecs = [_normalise_sign(q @ v[:, k]) for k in range(len(w))]
    pairs = [(float(w[k]), vecs[k]) for k in range(len(w))]
    a1 = vecs[0]
    res = np.linalg.norm(la @ a1 - w[0] * (lt @ a1)) / max(np.linalg.norm(la, 2), 1e-300)
    return CurvatureReport(ctx.p.copy(), float(w[0]), a1, pairs, flag, float(res))


def _plain_laplacian(m):
    lap = -m
    lap[np.diag_indices_from(lap)] = m.sum(axis=1)
    return lap


def kappa_value(ctx: GammaContext) -> float:
    """Smallest relative eigenvalue only; the hot path of the global search."""
    g = ctx.graph
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected; L(Theta) is singular on the complement of constants")
    q = complement_basis(g.n)
    ra = q.T @ _plain_laplacian(gamma2_matrix(ctx)) @ q
    rt = q.T @ _plain_laplacian(ctx.theta) @ q
    w = eigh(0.5 * (ra + ra.T), 0.5 * (rt + rt.T), eigvals_only=True, subset_by_index=[0, 0])
    return float(w[0])


def kappa(graph: Graph, mean: Mean, energy: Energy, p) -> float:
    """Local curvature bound at ``p``."""
    return kappa_value(build_context(graph, mean, energy, p))


@dataclass
class GlobalCurvatureReport:
    kappa0: float
    argmin_p: np.ndarray
    samples_evaluated: int
    method: dict
    diverges: bool = False
    margin_values: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kappa0": "-inf" if self.diverges else self.kappa0,
            "diverges": self.diverges,
            "argmin_p": self.argmin_p.tolist(),
            "samples_evaluated": self.samples_evaluated,
            "method": self.method,
            "margin_values": [[m, v] for m, v in self.margin_values],
        }


def _on_face(p: np.ndarray, margin: float) -> bool:
    return bool(np.min(p) <= margin * (1.0 + 1e-6))


def _looks_divergent(values, rel: float = 1e-6) -> bool:
    v1, v2, v3 = values
    d1, d2 = v1 - v2, v2 - v3
    # Decrements at rounding level come from flat minima, not divergence.
    floor = rel * max(1.0, abs(v1))
    return d1 > floor and d2 > floor and d2 >= 0.5 * d1


def global_curvature(graph: Graph, mean: Mean, energy: Energy,
                     search: SearchConfig | None = None,
                     detect_divergence: bool = True) -> GlobalCurvatureReport:
    """Minimise the local bound over ``{p_i >= margin}``.

    When the minimiser sits on the margin face the search is repeated at
    margins 1e-3, 1e-4, 1e-5.  If the minimum keeps dropping with
    non-shrinking decrements the bound is reported as ``-inf``.
    """
    search = search or SearchConfig()
    n = graph.n

    def obj(p):
        return kappa(graph, mean, energy, p)

    res = minimize_over_simplex(obj, n, search)
    method = {"search": "grid+sobol+pattern", **search.to_dict(n)}
    report = GlobalCurvatureReport(res.value, res.argmin, res.evaluations, method)
    if not (detect_divergence and _on_face(res.argmin, search.margin)):
        return report

    values = []
    evals = res.evaluations
    warm = res.argmin
    last = res
    for m in DIVERGENCE_MARGINS:
        cfg = dataclasses.replace(search, margin=m)
        start = np.where(warm <= search.margin * (1 + 1e-6), m, warm)
        start = start / start.sum()
        last = minimize_over_simplex(obj, n, cfg, extra_starts=[start])
        evals += last.evaluations
        values.append(last.value)
        warm = last.argmin
        if not _on_face(last.argmin, m):
            break
    report.margin_values = list(zip(DIVERGENCE_MARGINS, values))
    report.samples_evaluated = evals
    if last.value < report.kappa0:
        report.kappa0, report.argmin_p = last.value, last.argmin
    if len(values) == 3 and _looks_divergent(values):
        report.kappa0 = -math.inf
        report.diverges = True
        report.argmin_p = last.argmin
        report.method["divergence_rule"] = "face argmin at three margins, decrements not shrinking"
    return report


@dataclass
class ConstantCurvatureReport:
    constant: bool
    value: float | None
    spread: float
    samples: int


def is_constant_curvature(graph: Graph, mean: Mean, energy: Energy, tol: float = 1e-6,
                          samples: int = 64, seed: int = 0,
                          margin: float = 1e-3) -> ConstantCurvatureReport:
    """Check that every relative eigenvalue at every sampled point is the same number."""
    pts = simplex_samples(graph.n, samples, seed, margin)
    vals = []
    for p in pts:
        rep = local_curvature(build_context(graph, mean, energy, p))
        vals.extend(k for k, _ in rep.pairs)
    vals = np.asarray(vals)
    spread = float(vals.max() - vals.min())
    constant = spread <= tol
    return ConstantCurvatureReport(constant, float(np.median(vals)) if constant else None, spread, samples)
