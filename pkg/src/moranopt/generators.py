"""Random and synthetic fitness-graph instances for sweeps, audits, and tests.

Connectivity is guaranteed by construction (a random spanning tree or a
random directed cycle as the backbone) rather than by rejection, so
generation cost is flat and deterministic in the supplied generator.
"""

from __future__ import annotations

import numpy as np

from .graphs import FitnessGraph, build_graph


def _random_fitness(rng: np.random.Generator, n: int, bias: str) -> tuple[np.ndarray, np.ndarray]:
    if bias == "neutral":
        # one constant value; the degree closed form assumes it
        r = np.full(n, float(rng.uniform(0.5, 1.5)))
        return r.copy(), r
    if bias == "mutant":
        r = rng.uniform(0.5, 1.5, n)
        return r * rng.uniform(1.0, 2.0, n), r
    if bias == "resident":
        r = rng.uniform(0.5, 1.5, n)
        return r * rng.uniform(0.3, 1.0, n), r
    if bias == "arbitrary":
        return rng.uniform(0.5, 2.0, n), rng.uniform(0.5, 2.0, n)
    raise ValueError(f"unknown bias {bias!r}")


def random_fitness_graph(
    rng: np.random.Generator,
    n: int,
    directed: bool = False,
    bias: str = "arbitrary",
    extra_edge_prob: float = 0.35,
) -> FitnessGraph:
    """Strongly connected random instance with the requested fitness regime.

    Undirected: random spanning tree plus chords.  Directed: random
    Hamiltonian cycle plus extra arcs with weights renormalized per node.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    edges: list[tuple[int, int, float]] = []
    if directed:
        perm = rng.permutation(n)
        arcs = {(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)}
        for u in range(n):
            for v in range(n):
                if u != v and (u, v) not in arcs and rng.random() < extra_edge_prob:
                    arcs.add((u, v))
        raw = {(u, v): rng.uniform(0.2, 1.0) for (u, v) in sorted(arcs)}
        out_sum = np.zeros(n)
        for (u, _), w in raw.items():
            out_sum[u] += w
        edges = [(u, v, w / out_sum[u]) for (u, v), w in raw.items()]
    else:
        pairs = set()
        for v in range(1, n):
            pairs.add((int(rng.integers(0, v)), v))
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in pairs and rng.random() < extra_edge_prob:
                    pairs.add((u, v))
        edges = [(u, v, 1.0) for (u, v) in sorted(pairs)]

    m, r = _random_fitness(rng, n, bias)
    return build_graph(edges, directed, m, r)


def core_periphery_graph(
    n: int,
    n_pendant: int,
    rng: np.random.Generator,
    chord_prob: float = 0.15,
) -> FitnessGraph:
    """Undirected dense core with a few pendant nodes hanging off it.

    Degree is nearly flat inside the core and 1 on the pendants, which
    makes the handful of low-degree nodes decisive for seed placement.
    """
    if not (0 < n_pendant < n - 2):
        raise ValueError("need 0 < n_pendant < n - 2")
    n_core = n - n_pendant
    pairs = {(u, (u + 1) % n_core) for u in range(n_core)}
    pairs = {(min(u, v), max(u, v)) for u, v in pairs}
    for u in range(n_core):
        for v in range(u + 2, n_core):
            if (u, v) not in pairs and rng.random() < chord_prob:
                pairs.add((u, v))
    for i in range(n_pendant):
        anchor = int(rng.integers(0, n_core))
        pairs.add((anchor, n_core + i))
    edges = [(u, v, 1.0) for (u, v) in sorted(pairs)]
    ones = np.ones(n)
    return build_graph(edges, False, ones, ones)
