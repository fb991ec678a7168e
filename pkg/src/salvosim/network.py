"""Undirected communication graphs and switched dynamic networks.

Vertices are numbered 1..n. Topologies are immutable; the switching
schedule is a piecewise-constant, right-continuous selector over an
ordered family of graphs on the same vertex set.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

JACOBI_TOL = 1e-12
CONNECTIVITY_TOL = 1e-9


class DisconnectedGraphError(ValueError):
    """Raised when an operation requires a connected graph."""


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph on vertices 1..n."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        seen = set()
        canon = []
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge {e} outside 1..{self.n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @classmethod
    def from_edge_list(cls, n: int, edges: Iterable[Sequence[int]]) -> "Topology":
        return cls(n=n, edges=tuple((int(i), int(j)) for i, j in edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def neighborhood(g: Topology, i: int) -> frozenset[int]:
    """Vertices adjacent to vertex i."""
    if not 1 <= i <= g.n:
        raise ValueError(f"vertex {i} outside 1..{g.n}")
    out = set()
    for a, b in g.edges:
        if a == i:
            out.add(b)
        elif b == i:
            out.add(a)
    return frozenset(out)


def laplacian(g: Topology) -> np.ndarray:
    """Graph Laplacian: degree on the diagonal, -1 per edge."""
    lap = np.zeros((g.n, g.n))
    for i, j in g.edges:
        lap[i - 1, j - 1] -= 1.0
        lap[j - 1, i - 1] -= 1.0
        lap[i - 1, i - 1] += 1.0
        lap[j - 1, j - 1] += 1.0
    return lap


def incidence(g: Topology) -> np.ndarray:
    """n x E incidence matrix, +1 at the smaller vertex index of each edge.

    Satisfies incidence(g) @ incidence(g).T == laplacian(g) for any
    orientation; the smaller-index convention makes it reproducible.
    """
    inc = np.zeros((g.n, g.edge_count))
    for col, (i, j) in enumerate(g.edges):
        inc[i - 1, col] = 1.0
        inc[j - 1, col] = -1.0
    return inc


def is_connected(g: Topology) -> bool:
    """Breadth-first reachability from vertex 1."""
    if g.n == 1:
        return True
    adj: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
    for i, j in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen) == g.n


def _jacobi_eigenvalues(a: np.ndarray, tol: float = JACOBI_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm falls below tol. The
    matrices here are tiny (n in the tens), so no pivoting strategy is
    needed.
    """
    m = a.copy()
    n = m.shape[0]
    for _ in range(100):
        off = _offdiag_norm(m)
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(m[p, q]) < tol / (n * n):
                    continue
                app, aqq, apq = m[p, p], m[q, q], m[p, q]
                phi = 0.5 * np.arctan2(2.0 * apq, aqq - app)
                c, s = np.cos(phi), np.sin(phi)
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
    return np.sort(np.diag(m))


def _offdiag_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(off * off)))


def laplacian_spectrum(g: Topology) -> np.ndarray:
    """All Laplacian eigenvalues in ascending order (Jacobi iteration)."""
    return _jacobi_eigenvalues(laplacian(g))


def algebraic_connectivity(g: Topology) -> float:
    """Second-smallest Laplacian eigenvalue; positive iff g is connected."""
    spectrum = laplacian_spectrum(g)
    lam2 = float(spectrum[1]) if g.n > 1 else 0.0
    if lam2 < CONNECTIVITY_TOL:
        raise DisconnectedGraphError(
            f"graph is disconnected (second eigenvalue {lam2:.3e})"
        )
    return lam2


@dataclass(frozen=True)
class SwitchingSchedule:
    """Piecewise-constant selector sigma(t) over a family of graphs.

    segments is a sorted tuple of (start_time, graph_index) pairs with
    the first start at 0; the active graph on [t_k, t_{k+1}) is
    graphs[index_k] (right-continuous at switch instants). Indices are
    1-based to match the published topology numbering.
    """

    graphs: tuple[Topology, ...]
    segments: tuple[tuple[float, int], ...]
    min_dwell: float = 0.0
    _starts: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("schedule needs at least one graph")
        n0 = self.graphs[0].n
        for g in self.graphs:
            if g.n != n0:
                raise ValueError("all graphs must share the vertex set")
            if not is_connected(g):
                raise DisconnectedGraphError("every scheduled graph must be connected")
        if not self.segments or self.segments[0][0] != 0.0:
            raise ValueError("first segment must start at t = 0")
        starts = [s for s, _ in self.segments]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must strictly increase")
        dwells = [b - a for a, b in zip(starts, starts[1:])]
        if self.min_dwell > 0.0 and any(d < self.min_dwell - 1e-12 for d in dwells):
            raise ValueError("a dwell interval is shorter than min_dwell")
        for _, idx in self.segments:
            if not 1 <= idx <= len(self.graphs):
                raise ValueError(f"graph index {idx} outside 1..{len(self.graphs)}")
        object.__setattr__(self, "_starts", tuple(starts))

    @classmethod
    def fixed(cls, g: Topology) -> "SwitchingSchedule":
        return cls(graphs=(g,), segments=((0.0, 1),))

    @classmethod
    def random(
        cls,
        graphs: Sequence[Topology],
        min_dwell: float,
        max_dwell: float,
        t_max: float,
        seed: int,
    ) -> "SwitchingSchedule":
        """Seeded random signal: uniform dwells, never repeating a graph."""
        if min_dwell <= 0.0 or max_dwell < min_dwell:
            raise ValueError("need 0 < min_dwell <= max_dwell")
        rng = np.random.default_rng(seed)
        segments = []
        t = 0.0
        prev = -1
        while t < t_max:
            if len(graphs) == 1:
                idx = 1
            else:
                idx = int(rng.integers(1, len(graphs) + 1))
                while idx - 1 == prev:
                    idx = int(rng.integers(1, len(graphs) + 1))
            segments.append((t, idx))
            prev = idx - 1
            t += float(rng.uniform(min_dwell, max_dwell))
        return cls(graphs=tuple(graphs), segments=tuple(segments), min_dwell=min_dwell)

    def active_index(self, t: float) -> int:
        """1-based index of the graph active at time t (right-continuous)."""
        if t < 0.0:
            raise ValueError("t must be nonnegative")
        k = bisect.bisect_right(self._starts, t) - 1
        return self.segments[k][1]

    def active_graph(self, t: float) -> Topology:
        return self.graphs[self.active_index(t) - 1]


@dataclass(frozen=True)
class SpectralSummary:
    """Connectivity figures the guidance gains depend on."""

    lambda2: float
    min_lambda2_family: float
    min_edges_family: int


def spectral_summary(network: Topology | SwitchingSchedule) -> SpectralSummary:
    if isinstance(network, Topology):
        lam2 = algebraic_connectivity(network)
        return SpectralSummary(lam2, lam2, network.edge_count)
    lam2s = [algebraic_connectivity(g) for g in network.graphs]
    edges = [g.edge_count for g in network.graphs]
    return SpectralSummary(lam2s[0], min(lam2s), min(edges))
