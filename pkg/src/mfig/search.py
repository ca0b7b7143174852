"""Deterministic minimisation of a scalar function over the interior of the simplex.

Seeds come from a lattice grid plus scrambled Sobol points; each seed is
polished by pairwise mass-transfer pattern search with step halving.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .errors import InvalidArgumentError


def default_grid_per_dim(n: int) -> int:
    if n <= 4:
        return 33
    if n <= 8:
        return 9
    return 4


@dataclass(frozen=True)
class SearchConfig:
    grid_per_dim: int | None = None
    multistarts: int = 16
    margin: float = 1e-4
    seed: int = 0
    min_step: float = 1e-9
    # How many of the best grid seeds and of the best Sobol seeds get polished.
    refine_best: int = 4

    def validate(self, n: int) -> None:
        if not 0.0 < self.margin < 1.0 / n:
            raise InvalidArgumentError(f"margin must lie in (0, 1/n) = (0, {1.0 / n}), got {self.margin}")
        if self.grid_per_dim is not None and self.grid_per_dim < 2:
            raise InvalidArgumentError("grid_per_dim must be at least 2")
        if self.multistarts < 0:
            raise InvalidArgumentError("multistarts must be nonnegative")

    def to_dict(self, n: int) -> dict:
        return {
            "grid_per_dim": self.grid_per_dim or default_grid_per_dim(n),
            "multistarts": self.multistarts,
            "margin": self.margin,
            "seed": self.seed,
        }


@dataclass
class SearchResult:
    value: float
    argmin: np.ndarray
    evaluations: int
    trace: list = field(default_factory=list)


def _to_interior(q: np.ndarray, margin: float) -> np.ndarray:
    """Affine map of the closed simplex onto ``{p_i >= margin}``."""
    n = q.shape[-1]
    return margin + (1.0 - n * margin) * q


def simplex_grid(n: int, per_dim: int, margin: float) -> np.ndarray:
    """All lattice points ``k / N`` with ``N = per_dim - 1``, mapped into the margin interior."""
    N = per_dim - 1
    pts = []
    for bars in itertools.combinations(range(N + n - 1), n - 1):
        prev = -1
        comp = []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(N + n - 2 - prev)
        pts.append(comp)
    return _to_interior(np.asarray(pts, dtype=float) / N, margin)


def simplex_samples(n: int, count: int, seed: int = 0, margin: float = 1e-4) -> np.ndarray:
    """Quasi-random points spread uniformly over the margin interior."""
    if count <= 0:
        return np.zeros((0, n))
    sob = qmc.Sobol(d=n, scramble=True, seed=seed)
    # Sobol balance properties need power-of-two draws.
    u = sob.random_base2(max(0, math.ceil(math.log2(count))))[:count]
    e = -np.log1p(-np.clip(u, 0.0, 1.0 - 1e-16))
    e = np.maximum(e, 1e-300)
    return _to_interior(e / e.sum(axis=1, keepdims=True), margin)


def _key(v: float, p: np.ndarray):
    return (v, tuple(p.tolist()))


def pattern_search(obj: Callable[[np.ndarray], float], p0: np.ndarray, margin: float,
                   step0: float, min_step: float = 1e-10):
    """Polish ``p0`` by moving mass between coordinate pairs; returns (value, p, evals)."""
    p = p0.copy()
    v = obj(p)
    evals = 1
    n = p.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    step = step0
    while step >= min_step:
        improved = True
        while improved:
            improved = False
            for i, j in pairs:
                room = p[j] - margin
                if room <= 0.0:
                    continue
                d = min(step, room)
                q = p.copy()
                q[i] += d
                q[j] -= d
                if q[j] < margin:
                    q[j] = margin
                w = obj(q)
                evals += 1
                if w < v:
                    p, v = q, w
                    improved = True
        step *= 0.5
    return v, p, evals


def minimize_over_simplex(obj: Callable[[np.ndarray], float], n: int,
                          config: SearchConfig | None = None,
                          extra_starts=()) -> SearchResult:
    """Minimise ``obj`` over ``{p in simplex : p_i >= margin}``.

    Non-finite objective values count as ``+inf`` during seeding.  Ties are
    broken by the lexicographically smallest point so that the result does not
    depend on evaluation order.
    """
    config = config or SearchConfig()
    config.validate(n)
    if n == 1:
        p = np.ones(1)
        return SearchResult(float(obj(p)), p, 1)
    per_dim = config.grid_per_dim or default_grid_per_dim(n)
    margin = config.margin

    def safe(p):
        v = float(obj(p))
        return v if math.isfinite(v) else math.inf

    grid = simplex_grid(n, per_dim, margin)
    scored = sorted((_key(safe(p), p), idx) for idx, p in enumerate(grid))
    evals = len(grid)
    starts = [grid[idx] for _, idx in scored[: config.refine_best]]
    sob = simplex_samples(n, config.multistarts, config.seed, margin)
    sob_scored = sorted((_key(safe(p), p), idx) for idx, p in enumerate(sob))
    evals += len(sob)
    starts.extend(sob[idx] for _, idx in sob_scored[: config.refine_best])
    starts.extend(np.asarray(p, dtype=float) for p in extra_starts)

    best = None
    step0 = 1.0 / (per_dim - 1)
    for s in starts:
        s = np.maximum(s, margin)
        s = _to_interior((s - margin) / max((s - margin).sum(), 1e-300), margin)
        v, p, k = pattern_search(safe, s, margin, step0, config.min_step)
        evals += k
        cand = _key(v, p)
        if best is None or cand < best[0]:
            best = (cand, p)
    (value, _), p = best
    return SearchResult(value, p, evals)
