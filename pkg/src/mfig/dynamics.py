"""Gradient and heat flows, De Bruijn identities, dissipation, log-Sobolev and Costa checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .energies import Energy, Entropy, Interaction, Linear, SHANNON
from .errors import AssumptionViolatedError, BoundaryError, InvalidArgumentError, PreconditionError
from .gamma import build_context, gamma1, gamma2, simplex_point
from .graphs import Graph, laplacian
from .integrate import integrate_fixed
from .means import Mean, TransportInformation, compatible_mean
from .search import SearchConfig, minimize_over_simplex, simplex_samples

FLOW_BOUNDARY = 1e-9


# -- equilibrium -------------------------------------------------------------

def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _needs_interior(energy: Energy) -> bool:
    if isinstance(energy, Entropy):
        return energy.U.singular_at_zero
    return any(_needs_interior(e) for e in getattr(energy, "parts", ()))


def equilibrium(energy: Energy, n: int, tol: float = 1e-12, max_iter: int = 100000) -> np.ndarray:
    """Minimiser of ``E`` over the simplex by projected gradient with backtracking.

    Stops once the gradient mapping ``|p - P(p - s grad E)| / s`` drops below ``tol``.
    """
    interior = _needs_interior(energy)
    p = np.full(n, 1.0 / n)
    step = 1.0
    for _ in range(max_iter):
        g = energy.gradient(p)
        e0 = energy.value(p)
        while True:
            q = project_simplex(p - step * g)
            d = q - p
            if interior and np.min(q) <= 0.0:
                step *= 0.5
                continue
            if energy.value(q) <= e0 + g @ d + 0.5 / step * (d @ d) or step < 1e-16:
                break
            step *= 0.5
        if np.max(np.abs(d)) / step <= tol:
            return q
        p = q
        step = min(step * 2.0, 1e6)
    raise AssumptionViolatedError("projected gradient did not reach the requested residual")


# -- Fisher information ------------------------------------------------------

def fisher_information(ctx) -> float:
    """``I(p) = Gamma_1(p, grad E, grad E)``."""
    return gamma1(ctx, ctx.grad)


def j_functional(ctx) -> float:
    """``J(p) = Gamma_2(p, grad E, grad E)``."""
    return gamma2(ctx, ctx.grad)


def fisher_information_closed_form(ctx) -> float:
    """Family-specific expression of ``I`` for linear, interaction and entropy energies.

    For Shannon entropy under a transport information mean, the edge weight
    times the squared log-ratio collapses to ``2C (U(p_i) + U(p_j) - 2 U(m_ij))``
    with ``m_ij`` the midpoint.
    """
    e = ctx.energy
    i, j, _ = ctx.graph.edge_arrays()
    th = ctx.theta[i, j]
    p = ctx.p
    if isinstance(e, Linear):
        v = e.V
    elif isinstance(e, Interaction):
        v = e.W @ p
    elif isinstance(e, Entropy):
        if isinstance(ctx.mean, TransportInformation) and e.U is SHANNON:
            w = np.array([ctx.graph.weight(a, b) for a, b in zip(i, j)])
            U = e.U.U
            mid = 0.5 * (p[i] + p[j])
            return float(np.sum(w * 2.0 * ctx.mean.constant * (U(p[i]) + U(p[j]) - 2.0 * U(mid))))
        v = e.U.dU(p)
    else:
        raise InvalidArgumentError(f"no closed form for energy kind {e.kind!r}")
    return float(np.sum(th * (v[i] - v[j]) ** 2))


# -- flows -------------------------------------------------------------------

@dataclass
class FlowTrace:
    times: np.ndarray
    states: np.ndarray
    E: np.ndarray
    I: np.ndarray
    J: np.ndarray
    equilibrium: np.ndarray
    E_eq: float
    truncated: bool = False
    N: np.ndarray | None = None
    step: float = 0.0

    def rows(self):
        """CSV rows ``t, p_1..p_n, E, I, J[, N]``."""
        for k, t in enumerate(self.times):
            row = [float(t), *self.states[k].tolist(), float(self.E[k]), float(self.I[k]), float(self.J[k])]
            if self.N is not None:
                row.append(float(self.N[k]))
            yield row


def gradient_rhs(graph: Graph, mean: Mean, energy: Energy, p) -> np.ndarray:
    """``dp/dt = -L(Theta) grad E``."""
    ctx = build_context(graph, mean, energy, p, require_simplex=False)
    return -laplacian(ctx.theta) @ ctx.grad


def heat_rhs(graph: Graph, p, factor: float = 1.0) -> np.ndarray:
    """``dp_i/dt = factor * sum_{ij in E} w_ij (p_j - p_i)``."""
    return -factor * (laplacian(graph.adjacency()) @ np.asarray(p, dtype=float))


def heat_reduction_residual(graph: Graph, energy: Energy, p, mean: Mean | None = None) -> float:
    """Gap between the gradient flow under the compatible mean and the plain heat equation."""
    mean = mean or compatible_mean(energy)
    p = np.asarray(p, dtype=float)
    i, j, _ = graph.edge_arrays()
    th = np.asarray(mean(p[i], p[j]), dtype=float)
    if np.any(th < 0.0):
        raise AssumptionViolatedError("compatible mean is negative on some edge")
    return float(np.max(np.abs(gradient_rhs(graph, mean, energy, p) - heat_rhs(graph, p))))


def _trace(graph, mean, energy, traj):
    pi = equilibrium(energy, graph.n)
    E = np.array([energy.value(p) for p in traj])
    I = np.empty(len(traj))
    J = np.empty(len(traj))
    for k, p in enumerate(traj):
        ctx = build_context(graph, mean, energy, p / p.sum(), require_simplex=False)
        I[k] = fisher_information(ctx)
        J[k] = j_functional(ctx)
    return pi, E, I, J


def gradient_flow(graph: Graph, mean: Mean, energy: Energy, p0, t_end: float,
                  step: float) -> FlowTrace:
    """RK4 integration of the mean-field gradient flow, recording ``E, I, J``."""
    p0 = simplex_point(p0, graph.n)

    def stop(y):
        return "boundary" if np.min(y) < FLOW_BOUNDARY else None

    tr = integrate_fixed(lambda y: gradient_rhs(graph, mean, energy, y), p0, t_end, step, stop)
    pi, E, I, J = _trace(graph, mean, energy, tr.states)
    return FlowTrace(tr.times, tr.states, E, I, J, pi, energy.value(pi), tr.stopped, step=step)


def heat_flow(graph: Graph, energy: Energy, p0, t_end: float, step: float,
              factor: float = 0.5, mean: Mean | None = None) -> FlowTrace:
    """Discrete heat equation; ``E, I, J`` use the mean compatible with ``energy``."""
    p0 = simplex_point(p0, graph.n)
    mean = mean or compatible_mean(energy)

    def stop(y):
        return "boundary" if np.min(y) < FLOW_BOUNDARY else None

    tr = integrate_fixed(lambda y: heat_rhs(graph, y, factor), p0, t_end, step, stop)
    pi, E, I, J = _trace(graph, mean, energy, tr.states)
    return FlowTrace(tr.times, tr.states, E, I, J, pi, energy.value(pi), tr.stopped, step=step)


# -- De Bruijn ---------------------------------------------------------------

@dataclass
class DeBruijnReport:
    first_order: float
    second_order: float
    step: float


def de_bruijn_check(trace: FlowTrace) -> DeBruijnReport:
    """Central-difference residuals of ``dE/dt = -I`` and ``d2E/dt2 = 2J``."""
    h = trace.step
    E = trace.E
    if len(E) < 3:
        raise InvalidArgumentError("need at least three grid times")
    d1 = (E[2:] - E[:-2]) / (2.0 * h)
    d2 = (E[2:] - 2.0 * E[1:-1] + E[:-2]) / h**2
    r1 = float(np.max(np.abs(d1 + trace.I[1:-1])))
    r2 = float(np.max(np.abs(d2 - 2.0 * trace.J[1:-1])))
    return DeBruijnReport(r1, r2, h)


# -- dissipation -------------------------------------------------------------

@dataclass
class DissipationReport:
    kappa: float
    worst_energy_slack: float
    worst_j_slack: float
    passed: bool


def dissipation_certificate(trace: FlowTrace, kappa: float, tol: float = 1e-10) -> DissipationReport:
    """Check ``E(t) - E(pi) <= exp(-2 kappa t)(E(0) - E(pi))`` and ``J >= kappa I`` on the grid."""
    gap = trace.E - trace.E_eq
    bound = np.exp(-2.0 * kappa * trace.times) * gap[0]
    e_slack = float(np.min(bound - gap))
    j_slack = float(np.min(trace.J - kappa * trace.I))
    scale = max(1.0, abs(gap[0]))
    passed = e_slack >= -tol * scale and j_slack >= -tol * max(1.0, float(np.max(np.abs(trace.J))))
    return DissipationReport(kappa, e_slack, j_slack, passed)


# -- log-Sobolev -------------------------------------------------------------

@dataclass
class LogSobolevReport:
    kappa: float
    samples: int
    worst_ratio: float
    worst_slack: float
    closed_form_error: float
    passed: bool
    status: str = "checked"


def log_sobolev_check(graph: Graph, mean: Mean, energy: Energy, kappa: float,
                      samples: int = 10000, seed: int = 0, margin: float = 1e-6,
                      tol: float = 1e-12) -> LogSobolevReport:
    """Sample ``E(p) - E(pi) <= I(p) / (2 kappa)``.

    ``worst_ratio`` is the largest ``(E - E(pi)) / (I / 2 kappa)`` seen (<= 1
    means the inequality held everywhere).
    """
    if not kappa > 0.0:
        raise PreconditionError(f"log-Sobolev inequality needs kappa > 0, got {kappa}")
    pi = equilibrium(energy, graph.n)
    e_pi = energy.value(pi)
    pts = simplex_samples(graph.n, samples, seed, margin)
    worst_ratio = -math.inf
    worst_slack = math.inf
    cf_err = 0.0
    for p in pts:
        ctx = build_context(graph, mean, energy, p)
        I = fisher_information(ctx)
        try:
            cf = fisher_information_closed_form(ctx)
            cf_err = max(cf_err, abs(cf - I) / max(1.0, abs(I)))
        except InvalidArgumentError:
            pass
        lhs = energy.value(p) - e_pi
        rhs = I / (2.0 * kappa)
        worst_slack = min(worst_slack, rhs - lhs)
        if rhs > 0.0:
            worst_ratio = max(worst_ratio, lhs / rhs)
    passed = worst_slack >= -tol
    return LogSobolevReport(kappa, samples, worst_ratio, worst_slack, cf_err, passed)


def optimal_rate(graph: Graph, mean: Mean, energy: Energy, search: SearchConfig | None = None):
    """Diagnostic ``min_p J(p) / I(p)``; not claimed to be sharp."""
    def obj(p):
        ctx = build_context(graph, mean, energy, p)
        I = fisher_information(ctx)
        return j_functional(ctx) / I if I > 1e-300 else math.inf

    return minimize_over_simplex(obj, graph.n, search)


# -- Costa -------------------------------------------------------------------

def costa_oracle_k2(lo: float = 1e-3, hi: float = 0.499, tol: float = 1e-12):
    """Golden-section minimum of the two-point expression in ``x`` alone.

    Returns ``(1/m, x)``.
    """
    def f(x):
        l = math.log(x / (1.0 - x))
        return 1.0 / (l * (2.0 * x - 1.0)) + 1.0 / (2.0 * l * l * x * (1.0 - x))

    res = minimize_scalar(f, bracket=(lo, 0.05, hi), method="golden", tol=tol)
    return float(res.fun), float(res.x)


@dataclass
class CostaReport:
    m_inverse: float
    argmin: np.ndarray
    concavity_pass: bool
    worst_second_derivative: float
    trace: FlowTrace = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "m_inverse": self.m_inverse,
            "argmin": self.argmin.tolist(),
            "concavity_pass": self.concavity_pass,
            "worst_relative_second_derivative": self.worst_second_derivative,
        }


def costa_constant(graph: Graph, energy: Energy, search: SearchConfig | None = None):
    """``1/m = min_p Gamma_2(grad E, grad E) / Gamma_1(grad E, grad E)^2`` under the compatible mean."""
    if not isinstance(energy, Entropy):
        raise InvalidArgumentError("the Costa check needs an entropy energy sum U(p_i)")
    xs = np.linspace(1e-3, 1.0 - 1e-3, 257)
    if np.min(energy.U.d2U(xs)) <= 0.0:
        raise InvalidArgumentError("entropy density must be strictly convex")
    mean = compatible_mean(energy)

    def obj(p):
        ctx = build_context(graph, mean, energy, p)
        g1 = gamma1(ctx, ctx.grad)
        if g1 <= 1e-300:
            return math.inf
        return gamma2(ctx, ctx.grad) / g1**2

    return minimize_over_simplex(obj, graph.n, search), mean


def costa_check(graph: Graph, energy: Energy, p0, t_end: float = 2.0, step: float = 1e-3,
                search: SearchConfig | None = None, tol: float = 1e-7) -> CostaReport:
    """Entropy power ``N = exp(-2E/m)`` must be concave in time along the heat flow with factor 1/2."""
    res, mean = costa_constant(graph, energy, search)
    m_inv = res.value
    trace = heat_flow(graph, energy, p0, t_end, step, factor=0.5, mean=mean)
    N = np.exp(-2.0 * m_inv * trace.E)
    trace.N = N
    d2 = (N[2:] - 2.0 * N[1:-1] + N[:-2]) / step**2
    rel = d2 / np.abs(N[1:-1])
    worst = float(np.max(rel)) if len(rel) else 0.0
    return CostaReport(m_inv, res.argmin, worst <= tol, worst, trace)


def costa_identity_residual(graph: Graph, energy: Energy, p, h: float = 1e-4) -> tuple[float, float]:
    """``d/dt Gamma_1(grad E, grad E)`` by central difference along the 1/2 heat flow vs ``-Gamma_2``.

    Returns ``(finite difference, -Gamma_2)``.
    """
    mean = compatible_mean(energy)
    p = simplex_point(p, graph.n)

    def g1(q):
        ctx = build_context(graph, mean, energy, q, require_simplex=False)
        return gamma1(ctx, ctx.grad)

    fwd = integrate_fixed(lambda y: heat_rhs(graph, y, 0.5), p, h, h).states[-1]
    bwd = integrate_fixed(lambda y: -heat_rhs(graph, y, 0.5), p, h, h).states[-1]
    if min(np.min(fwd), np.min(bwd)) <= 0.0:
        raise BoundaryError("probe left the simplex interior")
    ctx = build_context(graph, mean, energy, p)
    return (g1(fwd) - g1(bwd)) / (2.0 * h), -gamma2(ctx, ctx.grad)
