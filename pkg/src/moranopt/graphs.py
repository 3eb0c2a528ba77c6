"""Immutable fitness-graph data model.

A fitness graph couples a weighted directed graph with two per-node fitness
functions: ``m(u)`` is the fitness a mutant exhibits at node ``u`` and
``r(u)`` the fitness of a resident there.  Out-weights ``w(u, .)`` of every
node form a probability distribution, the graph is strongly connected, and
self-loops are rejected (the loopy transform introduces them internally).

Adjacency is stored CSR-style (``indptr``/``targets``/``weights``) so the
structure can be handed to compiled simulation kernels unchanged.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadDistribution,
    DanglingNode,
    NegativeDelta,
    NonPositiveFitness,
    NotStronglyConnected,
    SelfLoopNotAllowed,
)

#: Per-node weight sums farther than this from 1 are a hard error;
#: anything inside is silently renormalized.
WEIGHT_TOLERANCE = 1e-9

#: Post-construction guarantee on every stored row sum.
ROW_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FitnessGraph:
    """Weighted directed graph with per-node mutant/resident fitness.

    Instances are immutable and safe to share read-only across workers;
    equality and hashing are by identity so graphs can key solver caches.
    Use :func:`build_graph` to construct a validated instance; the raw
    constructor performs no checks (tests exercise solver error paths
    through it).
    """

    n: int
    indptr: np.ndarray   # int64, shape (n+1,)
    targets: np.ndarray  # int64, arc targets in row order
    weights: np.ndarray  # float64, per-arc probabilities
    m: np.ndarray        # float64, mutant fitness per node
    r: np.ndarray        # float64, resident fitness per node
    directed: bool
    labels: tuple[str, ...] | None = None

    @property
    def n_arcs(self) -> int:
        return int(self.targets.size)

    def out_arcs(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Targets and weights of node ``u``'s outgoing arcs."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.targets[lo:hi], self.weights[lo:hi]

    def out_degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def edge_iter(self) -> Iterable[tuple[int, int, float]]:
        for u in range(self.n):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            for j in range(lo, hi):
                yield u, int(self.targets[j]), float(self.weights[j])

    def label_of(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)


@dataclass(frozen=True)
class FitnessSummary:
    """Extremal fitness values of a graph."""

    m_max: float
    r_min: float
    f_max: float


def build_graph(
    edges: Sequence[tuple[int, int, float]] | Sequence[tuple[int, int]],
    directed: bool,
    m: Sequence[float],
    r: Sequence[float],
    labels: Sequence[str] | None = None,
) -> FitnessGraph:
    """Validate and assemble a :class:`FitnessGraph`.

    ``edges`` holds ``(u, v)`` or ``(u, v, weight)`` tuples over dense node
    indices ``0..n-1`` with ``n = len(m)``.  For undirected graphs each
    input edge yields both arcs and weights are recomputed as ``1/degree``
    (any supplied weight is ignored).  For directed graphs weights are
    required, and each node's out-weights must sum to 1 within
    ``WEIGHT_TOLERANCE``; they are renormalized to machine precision.

    Raises :class:`DanglingNode`, :class:`SelfLoopNotAllowed`,
    :class:`NonPositiveFitness`, :class:`BadDistribution`, or
    :class:`NotStronglyConnected`.
    """
    m = np.asarray(m, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if m.ndim != 1 or m.shape != r.shape or m.size == 0:
        raise NonPositiveFitness("fitness vectors must be equal-length, nonempty 1-d sequences")
    n = int(m.size)
    if np.any(m <= 0) or np.any(r <= 0) or not (np.all(np.isfinite(m)) and np.all(np.isfinite(r))):
        raise NonPositiveFitness("all fitness values must be positive finite reals")
    if labels is not None and len(labels) != n:
        raise DanglingNode(f"expected {n} labels, got {len(labels)}")

    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        w = float(e[2]) if len(e) > 2 and e[2] is not None else np.nan
        if not (0 <= u < n and 0 <= v < n):
            raise DanglingNode(f"arc ({u},{v}) references a node outside [0,{n})")
        if u == v:
            raise SelfLoopNotAllowed(f"self-loop on node {u}")
        if directed:
            if not np.isfinite(w):
                raise BadDistribution(f"directed arc ({u},{v}) is missing a weight")
            if w <= 0:
                raise BadDistribution(f"arc ({u},{v}) has non-positive weight {w}")
            if v in adj[u]:
                raise BadDistribution(f"duplicate arc ({u},{v})")
            adj[u][v] = w
        else:
            # weight ignored; uniform 1/degree is recomputed below
            adj[u].setdefault(v, 1.0)
            adj[v].setdefault(u, 1.0)

    degrees = np.array([len(a) for a in adj], dtype=np.int64)
    # completely isolated nodes mean the index space is not dense; nodes
    # with in-arcs but no out-arcs fall through to the connectivity check
    touched = np.zeros(n, dtype=bool)
    for u, nbrs in enumerate(adj):
        if nbrs:
            touched[u] = True
            for v in nbrs:
                touched[v] = True
    if not np.all(touched) and n > 1:
        raise DanglingNode(f"node {int(np.argmin(touched))} appears in no edge")

    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    targets = np.empty(indptr[-1], dtype=np.int64)
    weights = np.empty(indptr[-1], dtype=np.float64)
    for u in range(n):
        if not adj[u]:
            continue
        tgts = sorted(adj[u])
        row = np.array([adj[u][v] for v in tgts], dtype=np.float64)
        if directed:
            s = row.sum()
            if abs(s - 1.0) > WEIGHT_TOLERANCE:
                raise BadDistribution(
                    f"out-weights of node {u} sum to {s!r}, off by more than {WEIGHT_TOLERANCE}"
                )
            # only touch rows that actually need it, so already-normalized
            # weights survive a write/read cycle bit-for-bit
            if abs(s - 1.0) > ROW_SUM_TOLERANCE:
                row /= s
        else:
            row = np.full(len(tgts), 1.0 / len(tgts))
        lo = indptr[u]
        targets[lo:lo + len(tgts)] = tgts
        weights[lo:lo + len(tgts)] = row

    g = FitnessGraph(
        n=n,
        indptr=indptr,
        targets=targets,
        weights=weights,
        m=m.copy(),
        r=r.copy(),
        directed=bool(directed),
        labels=tuple(str(x) for x in labels) if labels is not None else None,
    )
    if not is_strongly_connected(g):
        raise NotStronglyConnected("graph is not strongly connected over stored arcs")
    return g


def with_fitness(g: FitnessGraph, m: Sequence[float], r: Sequence[float]) -> FitnessGraph:
    """Same structure, new fitness vectors (validated)."""
    m = np.asarray(m, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if m.shape != (g.n,) or r.shape != (g.n,):
        raise NonPositiveFitness(f"fitness vectors must have shape ({g.n},)")
    if np.any(m <= 0) or np.any(r <= 0):
        raise NonPositiveFitness("all fitness values must be positive")
    return replace(g, m=m.copy(), r=r.copy())


def make_positional(g: FitnessGraph, active: Iterable[int], delta: float) -> FitnessGraph:
    """Positional variant: residents at 1 everywhere, mutants at 1+delta on the active set."""
    if delta < 0:
        raise NegativeDelta(f"delta must be >= 0, got {delta}")
    active = set(int(u) for u in active)
    if not active <= set(range(g.n)):
        raise DanglingNode("active set references nodes outside the graph")
    m = np.ones(g.n)
    for u in active:
        m[u] = 1.0 + delta
    return with_fitness(g, m, np.ones(g.n))


def is_mutant_biased(g: FitnessGraph) -> bool:
    """True iff m(u) >= r(u) at every node."""
    return bool(np.all(g.m >= g.r))


def is_resident_biased(g: FitnessGraph) -> bool:
    """True iff m(u) <= r(u) at every node."""
    return bool(np.all(g.m <= g.r))


def is_neutral(g: FitnessGraph) -> bool:
    return bool(np.all(g.m == g.r))


def summary(g: FitnessGraph) -> FitnessSummary:
    return FitnessSummary(
        m_max=float(g.m.max()),
        r_min=float(g.r.min()),
        f_max=float(max(g.m.max(), g.r.max())),
    )


def out_degrees(g: FitnessGraph) -> np.ndarray:
    return np.diff(g.indptr)


# -- connectivity --------------------------------------------------------------

def _reach_all(n, indptr, targets, start) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    count = 1
    while stack:
        u = stack.pop()
        for v in targets[indptr[u]:indptr[u + 1]]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(int(v))
    return count == n


def is_strongly_connected(g: FitnessGraph) -> bool:
    """Two sweeps: forward reachability from node 0 plus the same on the reverse graph."""
    if g.n == 1:
        return True
    if not _reach_all(g.n, g.indptr, g.targets, 0):
        return False
    rindptr, rtargets = _reverse_adjacency(g)
    return _reach_all(g.n, rindptr, rtargets, 0)


def _reverse_adjacency(g: FitnessGraph) -> tuple[np.ndarray, np.ndarray]:
    indeg = np.zeros(g.n, dtype=np.int64)
    np.add.at(indeg, g.targets, 1)
    rindptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(indeg, out=rindptr[1:])
    rtargets = np.empty(g.n_arcs, dtype=np.int64)
    cursor = rindptr[:-1].copy()
    for u in range(g.n):
        for v in g.targets[g.indptr[u]:g.indptr[u + 1]]:
            rtargets[cursor[v]] = u
            cursor[v] += 1
    return rindptr, rtargets


def strongly_connected_components(g: FitnessGraph) -> list[list[int]]:
    """Kosaraju SCCs, largest first (iterative; safe for thousands of nodes)."""
    order: list[int] = []
    seen = np.zeros(g.n, dtype=bool)
    for s in range(g.n):
        if seen[s]:
            continue
        stack: list[tuple[int, int]] = [(s, 0)]
        seen[s] = True
        while stack:
            u, i = stack[-1]
            row = g.targets[g.indptr[u]:g.indptr[u + 1]]
            if i < len(row):
                stack[-1] = (u, i + 1)
                v = int(row[i])
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, 0))
            else:
                order.append(u)
                stack.pop()

    rindptr, rtargets = _reverse_adjacency(g)
    comp = np.full(g.n, -1, dtype=np.int64)
    comps: list[list[int]] = []
    for s in reversed(order):
        if comp[s] >= 0:
            continue
        cid = len(comps)
        comp[s] = cid
        members = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in rtargets[rindptr[u]:rindptr[u + 1]]:
                if comp[v] < 0:
                    comp[v] = cid
                    members.append(int(v))
                    queue.append(int(v))
        comps.append(members)
    comps.sort(key=len, reverse=True)
    return comps
