"""Finite simple graphs, standard families, Cartesian products and Laplacians.

Vertices are stored 0-based internally (``0..n-1``); the edge-list text
format is 1-based.  Every edge is kept once as a sorted pair ``(i, j)`` with
``i < j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidArgumentError

FAMILIES = ("K_n", "path_n", "cycle_n", "hypercube_d")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional positive edge weights."""

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidArgumentError(f"vertex count must be a positive integer, got {self.n!r}")
        canon = []
        seen = set()
        for e in self.edges:
            i, j = (int(e[0]), int(e[1]))
            if i == j:
                raise InvalidArgumentError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidArgumentError(f"edge {(i, j)} has an endpoint outside 0..{self.n - 1}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidArgumentError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        weights = {}
        for e, w in dict(self.weights).items():
            key = (min(int(e[0]), int(e[1])), max(int(e[0]), int(e[1])))
            if key not in seen:
                raise InvalidArgumentError(f"weight given for non-edge {key}")
            w = float(w)
            if not w > 0.0:
                raise InvalidArgumentError(f"edge weight must be positive, got {w} on {key}")
            weights[key] = w
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_arrays", None)
        object.__setattr__(self, "_connected", None)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def weight(self, i: int, j: int) -> float:
        return self.weights.get((min(i, j), max(i, j)), 1.0)

    def adjacency(self, weighted: bool = True) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            w = self.weight(i, j) if weighted else 1.0
            a[i, j] = w
            a[j, i] = w
        return a

    def degrees(self) -> np.ndarray:
        return self.adjacency(weighted=False).sum(axis=1).astype(int)

    def is_connected(self) -> bool:
        if self._connected is None:
            object.__setattr__(self, "_connected", self._search_connected())
        return self._connected

    def _search_connected(self) -> bool:
        adj = {v: [] for v in range(self.n)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return endpoint index arrays and the weight array, one entry per edge."""
        if self._arrays is None:
            if not self.edges:
                empty = np.zeros(0, dtype=int)
                arrays = (empty, empty, np.zeros(0))
            else:
                e = np.asarray(self.edges, dtype=int)
                w = np.array([self.weight(i, j) for i, j in self.edges])
                arrays = (e[:, 0], e[:, 1], w)
            for a in arrays:
                a.setflags(write=False)
            object.__setattr__(self, "_arrays", arrays)
        return self._arrays

    def subgraph_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Same vertex set, restricted to ``edges`` (weights carried over)."""
        keep = [(min(i, j), max(i, j)) for i, j in edges]
        return Graph(self.n, tuple(keep), {e: self.weight(*e) for e in keep})


def build_standard(family: str, size: int) -> Graph:
    """Build ``K_n``, ``path_n``, ``cycle_n`` or ``hypercube_d``.

    Hypercube vertices are the integers ``0..2^d-1``; two vertices are adjacent
    when their binary codes differ in exactly one bit.
    """
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise InvalidArgumentError(f"size must be a positive integer, got {size!r}")
    size = int(size)
    if family == "K_n":
        return Graph(size, tuple(itertools.combinations(range(size), 2)))
    if family == "path_n":
        return Graph(size, tuple((i, i + 1) for i in range(size - 1)))
    if family == "cycle_n":
        if size < 3:
            raise InvalidArgumentError("a simple cycle needs at least 3 vertices")
        return Graph(size, tuple((i, (i + 1) % size) for i in range(size)))
    if family == "hypercube_d":
        n = 1 << size
        edges = [(v, v ^ (1 << b)) for v in range(n) for b in range(size) if v < v ^ (1 << b)]
        return Graph(n, tuple(edges))
    raise InvalidArgumentError(f"unknown graph family {family!r}; expected one of {FAMILIES}")


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product with row-major labels: ``(u, v) -> u * h.n + v``."""
    m = h.n
    edges = []
    weights = {}
    for u1, u2 in g.edges:
        for v in range(h.n):
            e = (u1 * m + v, u2 * m + v)
            edges.append(e)
            weights[e] = g.weight(u1, u2)
    for u in range(g.n):
        for v1, v2 in h.edges:
            e = (u * m + v1, u * m + v2)
            edges.append(e)
            weights[e] = h.weight(v1, v2)
    return Graph(g.n * m, tuple(edges), weights)


def transpose_labels(n_g: int, n_h: int) -> np.ndarray:
    """Permutation sending the label of ``(u, v)`` in G□H to that of ``(v, u)`` in H□G."""
    perm = np.empty(n_g * n_h, dtype=int)
    for u in range(n_g):
        for v in range(n_h):
            perm[u * n_h + v] = v * n_g + u
    return perm


def relabel(g: Graph, perm: np.ndarray) -> Graph:
    edges = [(int(perm[i]), int(perm[j])) for i, j in g.edges]
    weights = {(min(a, b), max(a, b)): g.weight(i, j) for (i, j), (a, b) in zip(g.edges, edges)}
    return Graph(g.n, tuple(edges), weights)


def laplacian(m: np.ndarray, allow_negative: bool = False) -> np.ndarray:
    """Return ``D - m`` where ``D`` holds the row sums of ``m``.

    ``m`` must be symmetric with zero diagonal.  Negative off-diagonal entries
    are rejected unless ``allow_negative`` is set; the Gamma-two coefficient
    matrix can have them and still needs a formal Laplacian.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {m.shape}")
    if np.any(np.diag(m) != 0.0):
        raise InvalidArgumentError("matrix must have a zero diagonal")
    if not np.array_equal(m, m.T):
        raise InvalidArgumentError("matrix must be symmetric")
    if not allow_negative and np.any(m < 0.0):
        raise InvalidArgumentError("negative off-diagonal entry")
    lap = -m.copy()
    lap[np.diag_indices_from(lap)] = m.sum(axis=1)
    return lap


# -- edge-list text format ---------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``n <count>`` followed by ``i j [weight]`` lines (1-based)."""
    n = None
    edges = []
    weights = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise InvalidArgumentError(f"line {lineno}: expected header 'n <count>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise InvalidArgumentError(f"line {lineno}: bad vertex count {parts[1]!r}") from None
            continue
        if len(parts) not in (2, 3):
            raise InvalidArgumentError(f"line {lineno}: expected 'i j [weight]'")
        try:
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            w = float(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise InvalidArgumentError(f"line {lineno}: malformed edge {line!r}") from None
        edges.append((i, j))
        if w is not None:
            weights[(min(i, j), max(i, j))] = w
    if n is None:
        raise InvalidArgumentError("missing header 'n <count>'")
    return Graph(n, tuple(edges), weights)


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"]
    for i, j in g.edges:
        if (i, j) in g.weights:
            lines.append(f"{i + 1} {j + 1} {g.weights[(i, j)]!r}")
        else:
            lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def graph_from_spec(spec: str) -> Graph:
    """Resolve ``k<n>|path<n>|cycle<n>|q<d>|file:<path>``."""
    s = spec.strip()
    if s.startswith("file:"):
        return read_edge_list(s[5:])
    low = s.lower()
    for prefix, family in (("path", "path_n"), ("cycle", "cycle_n"), ("k", "K_n"), ("q", "hypercube_d")):
        if low.startswith(prefix) and low[len(prefix):].isdigit():
            return build_standard(family, int(low[len(prefix):]))
    raise InvalidArgumentError(f"unrecognised graph spec {spec!r}")
