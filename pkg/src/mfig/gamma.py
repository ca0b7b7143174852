"""Gamma-one and Gamma-two operators of an energy on a weighted graph.

Conventions
-----------
* ``theta_ij = w_ij * theta(p_i, p_j)`` on edges and 0 elsewhere, together
  with all of its partials.
* ``eta_ij = theta_ij * (dE/dp_i - dE/dp_j)``.
* The geodesic correction vector ``h`` is identically zero.
* Triple sums run over ordered index triples exactly as written below.
* ``gamma1`` is the metric quadratic form ``sum over edges of
  theta_ij (f_i - f_j)^2``, i.e. ``f^T L(Theta) f``.  With this normalisation
  ``gamma2 / gamma1`` is the two-point curvature and ``gamma2`` equals
  ``d^2/dt^2 E`` along constant-speed geodesics of unit speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energies import Energy, Entropy, Interaction, Linear
from .errors import BoundaryError, InvalidArgumentError
from .graphs import Graph, laplacian
from .means import Mean

BOUNDARY_TOL = 1e-9
FORMULAS = ("F1", "F2", "F2-alt", "F3")


def simplex_point(p, n: int | None = None, boundary_tol: float = BOUNDARY_TOL,
                  sum_tol: float = 1e-10) -> np.ndarray:
    """Validate an interior point of the probability simplex."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or (n is not None and p.shape[0] != n):
        raise InvalidArgumentError(f"expected a probability vector of length {n}, got shape {p.shape}")
    if abs(p.sum() - 1.0) > sum_tol:
        raise InvalidArgumentError(f"probabilities sum to {p.sum()!r}, not 1")
    if np.min(p) < boundary_tol:
        raise BoundaryError(f"point lies within {boundary_tol} of the simplex boundary")
    return p


@dataclass(frozen=True, eq=False)
class GammaContext:
    """Edge weights, fluxes and their partials at a fixed point ``p``.

    Arrays are ``n x n``; index ``[i, j]`` refers to the ordered pair ``(i, j)``.

    theta, dtheta   -- ``theta_ij`` and ``d theta_ij / d p_i``
    eta, deta_i     -- ``eta_ij`` and ``d eta_ij / d p_i``
    deta_j          -- ``d eta_ij / d p_j``
    """

    graph: Graph
    mean: Mean
    energy: Energy
    p: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    eta: np.ndarray
    deta_i: np.ndarray
    deta_j: np.ndarray

    @property
    def n(self):
        return self.graph.n

    @property
    def dtheta_j(self):
        """``d theta_ij / d p_j``."""
        return self.dtheta.T

    @property
    def indicator(self):
        return (self.theta != 0.0).astype(float)


def build_context(graph: Graph, mean: Mean, energy: Energy, p,
                  require_simplex: bool = True) -> GammaContext:
    """Evaluate everything Gamma-two needs at ``p``.

    ``require_simplex=False`` accepts any strictly positive vector, which is
    how homogeneity in ``p`` is probed.
    """
    n = graph.n
    if require_simplex:
        p = simplex_point(p, n)
    else:
        p = np.asarray(p, dtype=float)
        if p.shape != (n,):
            raise InvalidArgumentError(f"expected a vector of length {n}, got shape {p.shape}")
        if np.min(p) <= 0.0:
            raise BoundaryError("point must be strictly positive")
    if energy.n is not None and energy.n != n:
        raise InvalidArgumentError(f"energy dimension {energy.n} does not match graph size {n}")
    g = np.asarray(energy.gradient(p), dtype=float)
    hs = np.asarray(energy.hessian(p), dtype=float)

    i, j, w = graph.edge_arrays()
    theta = np.zeros((n, n))
    dtheta = np.zeros((n, n))
    if len(i):
        th = w * np.asarray(mean(p[i], p[j]), dtype=float)
        theta[i, j] = th
        theta[j, i] = th
        dtheta[i, j] = w * np.asarray(mean.d1(p[i], p[j]), dtype=float)
        dtheta[j, i] = w * np.asarray(mean.d1(p[j], p[i]), dtype=float)

    gdiff = g[:, None] - g[None, :]
    hd = np.diag(hs)
    eta = theta * gdiff
    deta_i = dtheta * gdiff + theta * (hd[:, None] - hs)
    deta_j = dtheta.T * gdiff + theta * (hs - hd[None, :])
    return GammaContext(graph, mean, energy, p, g, hs, theta, dtheta, eta, deta_i, deta_j)


def _check_f(ctx: GammaContext, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (ctx.n,):
        raise InvalidArgumentError(f"potential has shape {f.shape}, expected ({ctx.n},)")
    return f


def gamma1(ctx: GammaContext, f) -> float:
    """Metric quadratic form ``sum_{ij in E} theta_ij (f_i - f_j)^2``."""
    f = _check_f(ctx, f)
    d = f[:, None] - f[None, :]
    return float(0.5 * np.sum(ctx.theta * d * d))


def gamma2(ctx: GammaContext, f, formula: str = "F3") -> float:
    """Gamma-two by one of the equivalent triple-sum formulas.

    ``F1``   two-sum form
    ``F2``   mixed form with the ``1/2 d theta_ki / d p_k eta_jk`` term
    ``F2-alt`` regrouping with ``1/2 d theta_jk / d p_j eta_ij`` instead (not equivalent)
    ``F3``   fully squared form (canonical)
    """
    f = _check_f(ctx, f)
    T, Ti, H, Hi = ctx.theta, ctx.dtheta, ctx.eta, ctx.deta_i
    d = f[:, None] - f[None, :]
    d2 = d * d
    es = np.einsum
    if formula == "F1":
        return float(0.5 * es("ij,ij,ki->", d2, Ti, H) + es("ij,ik,ij,ki->", d, d, Hi, T))
    if formula == "F2":
        return float(0.5 * es("ij,ik,ij,ki->", d, d, Ti, H)
                     + 0.5 * es("ij,ik,ki,jk->", d, d, Ti, H)
                     + es("ij,ik,ij,ki->", d, d, Hi, T))
    if formula == "F2-alt":
        return float(0.5 * es("ij,ik,ij,ki->", d, d, Ti, H)
                     + 0.5 * es("ij,ik,jk,ij->", d, d, Ti, H)
                     + es("ij,ik,ij,ki->", d, d, Hi, T))
    if formula == "F3":
        return float(0.5 * (es("ij,ij,ki->", d2, Ti, H)
                            + es("ij,ij,ki->", d2, Hi, T)
                            + es("ij,jk,ij->", d2, Hi, T)
                            - es("ij,ki,jk->", d2, Hi, T)))
    raise InvalidArgumentError(f"unknown formula {formula!r}; expected one of {FORMULAS}")


def gamma2_matrix(ctx: GammaContext) -> np.ndarray:
    """Symmetric coefficient matrix ``A = (a_ij)`` of Gamma-two.

    Uses the eight-term expression for ``a_ij``; Gamma-two is the Laplacian
    quadratic form ``f^T L(A) f = sum_{i<j} a_ij (f_i - f_j)^2``.  ``a_ij``
    can be nonzero for vertices at distance two and can be negative.
    """
    T, Ti, Tj = ctx.theta, ctx.dtheta, ctx.dtheta_j
    H, Hi, Hj = ctx.eta, ctx.deta_i, ctx.deta_j
    col_H = H.sum(axis=0)        # sum_k eta_ki
    row_H = H.sum(axis=1)        # sum_k eta_jk
    deg = T.sum(axis=0)          # sum_k theta_ki
    row_Hi = Hi.sum(axis=1)      # sum_k d eta_jk / d p_j
    col_Hj = Hj.sum(axis=0)      # sum_k d eta_ki / d p_i
    a = (Ti * col_H[:, None]
         + Hi * deg[:, None]
         + T * row_Hi[None, :]
         - (T @ Hi).T
         - Tj * row_H[None, :]
         - Hj * deg[None, :]
         - T * col_Hj[:, None]
         + (Hj @ T).T)
    a = 0.25 * (a + a.T)
    np.fill_diagonal(a, 0.0)
    return a


def quadratic_form(a: np.ndarray, f) -> float:
    """``sum_{i<j} a_ij (f_i - f_j)^2`` for a symmetric ``a``."""
    f = np.asarray(f, dtype=float)
    d = f[:, None] - f[None, :]
    return float(0.5 * np.sum(a * d * d))


def theta_laplacian(ctx: GammaContext) -> np.ndarray:
    return laplacian(ctx.theta)


def gamma2_laplacian(ctx: GammaContext) -> np.ndarray:
    return laplacian(gamma2_matrix(ctx), allow_negative=True)


def gamma2_edge(ctx: GammaContext, edge, f) -> float:
    """Single-edge Gamma-two term used by the C4-property."""
    f = _check_f(ctx, f)
    i, j = int(edge[0]), int(edge[1])
    if ctx.theta[i, j] == 0.0:
        raise InvalidArgumentError(f"{(i, j)} is not an edge")
    dth = ctx.dtheta[i, j] - ctx.dtheta[j, i]
    deta = ctx.deta_i[i, j] - ctx.deta_j[i, j]
    return float((f[i] - f[j]) ** 2 * (-0.5 * dth * ctx.eta[i, j] + deta * ctx.theta[i, j]))


def gamma2_edges_sum(ctx: GammaContext, f) -> float:
    return sum(gamma2_edge(ctx, e, f) for e in ctx.graph.edges)


# -- closed forms for the three energy families ------------------------------

def _family_core(ctx, f, gvec):
    """Part of Gamma-two shared by the linear/interaction/entropy closed forms."""
    T, Ti = ctx.theta, ctx.dtheta
    d = f[:, None] - f[None, :]
    d2 = d * d
    gk_gj = gvec[None, :] - gvec[:, None]   # [j, k] -> g_k - g_j
    gk_gi = gk_gj                            # [i, k] -> g_k - g_i, same array
    es = np.einsum
    s = (es("ij,ij,ki,jk->", d2, Ti, T, gk_gj)
         - es("ij,jk,ij,jk->", d2, Ti, T, gk_gj)
         - es("ij,ki,jk,ik->", d2, Ti, T, gk_gi))
    return 0.5 * s, d2


def gamma2_linear(ctx: GammaContext, V, f) -> float:
    """Closed form of Gamma-two for ``E = sum V_i p_i``."""
    f = _check_f(ctx, f)
    core, _ = _family_core(ctx, f, np.asarray(V, dtype=float))
    return float(core)


def gamma2_interaction(ctx: GammaContext, W, f) -> float:
    """Closed form for ``E = 1/2 sum_ij W_ij p_i p_j``."""
    f = _check_f(ctx, f)
    W = np.asarray(W, dtype=float)
    core, d2 = _family_core(ctx, f, W @ ctx.p)
    T = ctx.theta
    wd = np.diag(W)
    c = wd[:, None] - W    # [i, j] -> W_ii - W_ij
    es = np.einsum
    extra = (es("ij,ij,ij,ki->", d2, c, T, T)
             + es("ij,jk,jk,ij->", d2, c, T, T)
             - es("ij,ki,ki,jk->", d2, c, T, T))
    return float(core + 0.5 * extra)


def gamma2_entropy(ctx: GammaContext, U, f) -> float:
    """Closed form for ``E = sum U(p_i)``; ``U`` is an ``EntropyKind``."""
    f = _check_f(ctx, f)
    core, d2 = _family_core(ctx, f, np.asarray(U.dU(ctx.p), dtype=float))
    T = ctx.theta
    u2 = np.asarray(U.d2U(ctx.p), dtype=float)
    es = np.einsum
    extra = (es("i,ij,ki,ij->", u2, T, T, d2)
             + es("j,jk,ij,ij->", u2, T, T, d2)
             - es("k,ki,jk,ij->", u2, T, T, d2))
    return float(core + 0.5 * extra)


def gamma2_compatible(ctx: GammaContext, f) -> float:
    """Closed form when ``theta_ij (dE/dp_i - dE/dp_j) = p_i - p_j`` on every edge."""
    f = _check_f(ctx, f)
    T, Ti, A = ctx.theta, ctx.dtheta, ctx.indicator
    p = ctx.p
    d = f[:, None] - f[None, :]
    d2 = d * d
    pk_pi = p[None, :] - p[:, None]   # [i, k] -> p_k - p_i
    es = np.einsum
    s = (es("ij,ij,ik,ki->", d2, Ti, pk_pi, A)
         + es("ij,ij,ki->", d2, A, T)
         + es("ij,jk,ij->", d2, A, T)
         - es("ij,ki,jk->", d2, A, T))
    return float(0.5 * s)


def gamma2_closed_form(ctx: GammaContext, f) -> float:
    """Dispatch to the family closed form matching ``ctx.energy``."""
    e = ctx.energy
    if isinstance(e, Linear):
        return gamma2_linear(ctx, e.V, f)
    if isinstance(e, Interaction):
        return gamma2_interaction(ctx, e.W, f)
    if isinstance(e, Entropy):
        return gamma2_entropy(ctx, e.U, f)
    raise InvalidArgumentError(f"no closed form for energy kind {e.kind!r}")


# -- tensor identities -------------------------------------------------------

@dataclass
class TensorIdentityReport:
    ijk2ij: float
    ij2ijk: float
    symmetry: float
    antisymmetry: float
    passed: bool


def tensor_identity_check(a, b, x, tol: float = 1e-12) -> TensorIdentityReport:
    """Relative residuals of the two 3-tensor identities and the (anti)symmetry sums.

    The 2-index identities use the symmetric part of ``a[:, :, 0]`` and the
    antisymmetric part of ``b[:, :, 0]``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    d = x[:, None] - x[None, :]
    d2 = d * d
    es = np.einsum

    def rel(lhs, rhs, scale):
        return abs(lhs - rhs) / max(1.0, scale)

    lhs1 = es("ijk,ij,ik->", a, d, d)
    # transpose(2, 0, 1)[i, j, k] = a_jki and transpose(1, 2, 0)[i, j, k] = a_kij
    rhs1 = 0.5 * es("ijk,ij->", a + a.transpose(2, 0, 1) - a.transpose(1, 2, 0), d2)
    sc1 = es("ijk,ij,ik->", np.abs(a), np.abs(d), np.abs(d))

    lhs2 = es("ijk,ij->", b, d2)
    rhs2 = es("ijk,ij,ik->", b + b.transpose(1, 2, 0), d, d)
    sc2 = es("ijk,ij->", np.abs(b), d2)

    s = 0.5 * (a[:, :, 0] + a[:, :, 0].T)
    q = 0.5 * (b[:, :, 0] - b[:, :, 0].T)
    sym = rel(np.sum(s * x[:, None]), 0.5 * np.sum(s * (x[:, None] + x[None, :])),
              np.sum(np.abs(s)) * np.max(np.abs(x), initial=0.0))
    anti = rel(np.sum(q * x[:, None]), 0.5 * np.sum(q * d),
               np.sum(np.abs(q)) * np.max(np.abs(x), initial=0.0))
    r1 = rel(lhs1, rhs1, sc1)
    r2 = rel(lhs2, rhs2, sc2)
    return TensorIdentityReport(r1, r2, sym, anti, max(r1, r2, sym, anti) <= tol)


def gamma_batch(ctx: GammaContext, F) -> tuple[np.ndarray, np.ndarray]:
    """Gamma-one and Gamma-two (F3) for every row of ``F`` at once."""
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[1] != ctx.n:
        raise InvalidArgumentError(f"potentials must have shape (m, {ctx.n}), got {F.shape}")
    T, Ti, H, Hi = ctx.theta, ctx.dtheta, ctx.eta, ctx.deta_i
    d = F[:, :, None] - F[:, None, :]
    d2 = d * d
    g1 = 0.5 * np.einsum("bij,ij->b", d2, T)
    # F3 with the k-sums folded into per-pair weights.
    w = (Ti * H.sum(axis=0)[:, None]
         + Hi * T.sum(axis=0)[:, None]
         + T * Hi.sum(axis=1)[None, :]
         - (T @ Hi).T)
    g2 = 0.5 * np.einsum("bij,ij->b", d2, w)
    return g1, g2
