"""Constant-speed geodesics of the mean-field metric (with ``h = 0``)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energies import Energy
from .errors import BoundaryError, InvalidArgumentError
from .gamma import build_context, gamma1, gamma2
from .graphs import Graph
from .integrate import integrate_fixed
from .means import Mean

BOUNDARY_STOP = 1e-6
BOUNDARY_ERROR = 1e-9


@dataclass(frozen=True)
class GeodesicState:
    p: np.ndarray
    f: np.ndarray
    t: float = 0.0


def _edge_terms(graph: Graph, mean: Mean, p: np.ndarray):
    i, j, w = graph.edge_arrays()
    th = w * np.asarray(mean(p[i], p[j]), dtype=float)
    d_i = w * np.asarray(mean.d1(p[i], p[j]), dtype=float)   # d theta_ij / d p_i
    d_j = w * np.asarray(mean.d1(p[j], p[i]), dtype=float)   # d theta_ij / d p_j
    return i, j, th, d_i, d_j


def geodesic_rhs(graph: Graph, mean: Mean, p, f):
    """``dp_i = sum_j (f_i - f_j) theta_ij``, ``df_i = -1/2 sum_j (f_i - f_j)^2 d theta_ij / d p_i``."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    if p.shape != (graph.n,) or f.shape != (graph.n,):
        raise InvalidArgumentError("p and f must both have one entry per vertex")
    if np.min(p) < BOUNDARY_ERROR:
        raise BoundaryError(f"p is within {BOUNDARY_ERROR} of the boundary")
    i, j, th, d_i, d_j = _edge_terms(graph, mean, p)
    df_e = f[i] - f[j]
    flux = df_e * th
    dp = np.zeros(graph.n)
    np.add.at(dp, i, flux)
    np.add.at(dp, j, -flux)
    sq = df_e * df_e
    df = np.zeros(graph.n)
    np.add.at(df, i, -0.5 * sq * d_i)
    np.add.at(df, j, -0.5 * sq * d_j)
    return dp, df


@dataclass
class GeodesicTrajectory:
    times: np.ndarray
    p: np.ndarray
    f: np.ndarray
    boundary_stop: bool

    def speeds(self, graph: Graph, mean: Mean) -> np.ndarray:
        """Gamma-one of ``f(t)`` at ``p(t)`` along the trajectory."""
        out = np.empty(len(self.times))
        for k, (p, f) in enumerate(zip(self.p, self.f)):
            i, j, th, _, _ = _edge_terms(graph, mean, p)
            out[k] = float(np.sum(th * (f[i] - f[j]) ** 2))
        return out

    def energies(self, energy: Energy) -> np.ndarray:
        return np.array([energy.value(p) for p in self.p])


def integrate_geodesic(graph: Graph, mean: Mean, initial: GeodesicState, t_end: float,
                       step: float, boundary: float = BOUNDARY_STOP) -> GeodesicTrajectory:
    """Fixed-step RK4 integration; stops early (flagged) once some ``p_i < boundary``."""
    n = graph.n
    p0 = np.asarray(initial.p, dtype=float)
    f0 = np.asarray(initial.f, dtype=float)
    if np.min(p0) < boundary:
        raise BoundaryError("initial point is already inside the boundary layer")

    def rhs(y):
        dp, df = geodesic_rhs(graph, mean, y[:n], y[n:])
        return np.concatenate([dp, df])

    def stop(y):
        return "boundary" if np.min(y[:n]) < boundary else None

    tr = integrate_fixed(rhs, np.concatenate([p0, f0]), t_end, step, stop)
    return GeodesicTrajectory(initial.t + tr.times, tr.states[:, :n], tr.states[:, n:], tr.stopped)


def unit_speed(graph: Graph, mean: Mean, p, f) -> np.ndarray:
    """Rescale ``f`` so that Gamma-one at ``p`` equals 1."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    i, j, th, _, _ = _edge_terms(graph, mean, p)
    s = float(np.sum(th * (f[i] - f[j]) ** 2))
    if s <= 0.0:
        raise InvalidArgumentError("potential has zero speed")
    return f / np.sqrt(s)


def relative_speed_drift(traj: GeodesicTrajectory, graph: Graph, mean: Mean) -> float:
    g = traj.speeds(graph, mean)
    return float(np.max(np.abs(g - g[0])) / g[0])


@dataclass
class HessianCheck:
    fd_second_derivative: float
    gamma2: float
    gamma1: float
    step: float


def energy_hessian_check(graph: Graph, mean: Mean, energy: Energy, p0, f0,
                         h: float = 1e-3, substeps: int = 10) -> HessianCheck:
    """Central second difference of ``E`` along the geodesic through ``(p0, f0)``.

    Backward time is obtained by flipping the covector, the system being
    reversible under ``(t, f) -> (-t, -f)``.
    """
    p0 = np.asarray(p0, dtype=float)
    f0 = np.asarray(f0, dtype=float)
    dt = h / substeps
    fwd = integrate_geodesic(graph, mean, GeodesicState(p0, f0), h, dt)
    bwd = integrate_geodesic(graph, mean, GeodesicState(p0, -f0), h, dt)
    if fwd.boundary_stop or bwd.boundary_stop:
        raise BoundaryError("geodesic left the interior during the finite-difference probe")
    e_plus = energy.value(fwd.p[-1])
    e_minus = energy.value(bwd.p[-1])
    e0 = energy.value(p0)
    ctx = build_context(graph, mean, energy, p0)
    return HessianCheck((e_plus - 2.0 * e0 + e_minus) / h**2, gamma2(ctx, f0), gamma1(ctx, f0), h)
