"""Seed-set selection: greedy maximization plus structure-only baselines.

Greedy adds, in each round, the node whose inclusion maximizes the
evaluated fixation probability (ties toward the smallest node id).  On
mutant-biased graphs the objective is submodular, so marginal gains only
shrink and a lazy priority-queue sweep skips most re-evaluations; lazy and
plain greedy coincide there when the evaluator is exact.

Evaluators are callables ``(seed_mask, rng_seed) -> float``.  Monte Carlo
evaluators honor the seed, which greedy fixes per round so all candidates
of a round share common random numbers; exact evaluators ignore it.

The baselines mirror standard seed-selection heuristics: uniform random,
smallest degree, smallest closeness centrality, smallest PageRank score.
Centralities are structure-only and ignore fitness.  On directed graphs,
degree means out-degree and closeness uses outgoing distances, matching
the direction in which reproduction replaces neighbors.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse

from .errors import NoConvergence
from .estimator import DEFAULT_RUNS, EstimatorConfig, FixationEstimate, estimate_fp
from .exact import fixation_table
from .graphs import FitnessGraph, is_mutant_biased, out_degrees

_SEED_STRIDE = 0x9E3779B97F4A7C15
_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SelectionResult:
    """Chosen seeds in pick order, with per-round marginal gains for greedy."""

    seeds: tuple[int, ...]
    gains: tuple[float, ...]
    method: str
    fp_final: FixationEstimate | None = None


def round_seed(master_seed: int, round_index: int) -> int:
    """Common-random-numbers seed shared by every candidate of one greedy round."""
    return (master_seed ^ (_SEED_STRIDE * (round_index + 1))) & _U64


def exact_evaluator(g: FitnessGraph, **solver_kw):
    """fp oracle backed by the absorbing-chain table; the rng seed is ignored."""
    table = fixation_table(g, **solver_kw)

    def evaluate(mask: int, rng_seed: int = 0) -> float:
        return float(table.fp[mask])

    return evaluate


def mc_evaluator(g: FitnessGraph, runs: int = DEFAULT_RUNS, step_cap: int | None = None):
    """fp oracle backed by the Monte Carlo estimator."""

    def evaluate(mask: int, rng_seed: int = 0) -> float:
        cfg = EstimatorConfig(fixed_runs=runs, step_cap=step_cap, master_seed=rng_seed)
        return estimate_fp(g, mask, cfg).fp_hat

    return evaluate


def greedy_select(
    g: FitnessGraph,
    k: int,
    evaluator,
    master_seed: int = 0,
    lazy: bool | None = None,
) -> SelectionResult:
    """Iterative argmax over single-node additions; evaluator failures propagate.

    ``lazy`` defaults to True exactly when the graph is mutant-biased (the
    regime with a diminishing-returns guarantee); forcing it elsewhere is
    allowed but can change the picks.
    """
    if k < 1:
        raise ValueError("greedy needs a budget k >= 1")
    k_eff = min(k, g.n)
    if lazy is None:
        lazy = is_mutant_biased(g)
    picker = _greedy_lazy if lazy else _greedy_plain
    seeds, gains = picker(g, k_eff, evaluator, master_seed)
    return SelectionResult(seeds=tuple(seeds), gains=tuple(gains), method="greedy")


def _greedy_plain(g, k_eff, evaluator, master_seed):
    mask = 0
    current = 0.0
    seeds: list[int] = []
    gains: list[float] = []
    for j in range(k_eff):
        seed_j = round_seed(master_seed, j)
        best_u, best_val = -1, -np.inf
        for u in range(g.n):
            if (mask >> u) & 1:
                continue
            val = evaluator(mask | (1 << u), seed_j)
            if val > best_val:
                best_u, best_val = u, val
        mask |= 1 << best_u
        seeds.append(best_u)
        gains.append(best_val - current)
        current = best_val
    return seeds, gains


def _greedy_lazy(g, k_eff, evaluator, master_seed):
    mask = 0
    current = 0.0
    seeds: list[int] = []
    gains: list[float] = []

    seed_0 = round_seed(master_seed, 0)
    heap = [(-evaluator(1 << u, seed_0), u, 0) for u in range(g.n)]
    heapq.heapify(heap)

    for j in range(k_eff):
        seed_j = round_seed(master_seed, j)
        while True:
            neg_gain, u, stamp = heapq.heappop(heap)
            if stamp == j:
                break
            fresh = evaluator(mask | (1 << u), seed_j) - current
            heapq.heappush(heap, (-fresh, u, j))
        mask |= 1 << u
        seeds.append(u)
        gains.append(-neg_gain)
        current += -neg_gain
    return seeds, gains


def with_final_estimate(result: SelectionResult, g: FitnessGraph, config: EstimatorConfig) -> SelectionResult:
    """Attach a fresh fixation estimate of the selected set."""
    mask = 0
    for u in result.seeds:
        mask |= 1 << u
    return replace(result, fp_final=estimate_fp(g, mask, config))


# -- baselines -------------------------------------------------------------------

def baseline_random(g: FitnessGraph, k: int, rng: np.random.Generator) -> SelectionResult:
    k_eff = min(k, g.n)
    picks = rng.choice(g.n, size=k_eff, replace=False) if k_eff else np.empty(0, dtype=int)
    return SelectionResult(seeds=tuple(int(u) for u in picks), gains=(), method="random")


def _k_smallest(scores: np.ndarray, k: int) -> tuple[int, ...]:
    order = np.argsort(scores, kind="stable")  # ties resolve toward small ids
    return tuple(int(u) for u in order[:k])


def baseline_min_degree(g: FitnessGraph, k: int) -> SelectionResult:
    seeds = _k_smallest(out_degrees(g).astype(float), min(k, g.n))
    return SelectionResult(seeds=seeds, gains=(), method="degree")


def closeness(g: FitnessGraph) -> np.ndarray:
    """c(u) = (n-1) / sum_v dist(u, v), unweighted outgoing shortest paths."""
    n = g.n
    scores = np.zeros(n)
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.targets[g.indptr[u]:g.indptr[u + 1]]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(int(v))
        total = int(dist.sum())
        scores[s] = (n - 1) / total if total > 0 else 0.0
    return scores


def baseline_min_closeness(g: FitnessGraph, k: int) -> SelectionResult:
    seeds = _k_smallest(closeness(g), min(k, g.n))
    return SelectionResult(seeds=seeds, gains=(), method="closeness")


def pagerank(
    g: FitnessGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Power iteration on the arc weights; scores sum to 1.

    Strong connectivity rules out dangling rows, so total mass is conserved
    each sweep.  Raises :class:`NoConvergence` past ``max_iter``.
    """
    n = g.n
    if n == 1:
        return np.ones(1)
    row = np.repeat(np.arange(n), np.diff(g.indptr))
    w_t = scipy.sparse.csr_matrix((g.weights, (g.targets, row)), shape=(n, n))
    pr = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iter):
        nxt = teleport + damping * (w_t @ pr)
        if np.abs(nxt - pr).sum() < tol:
            return nxt
        pr = nxt
    raise NoConvergence(f"pagerank did not reach {tol} in {max_iter} iterations")


def baseline_min_pagerank(g: FitnessGraph, k: int) -> SelectionResult:
    seeds = _k_smallest(pagerank(g), min(k, g.n))
    return SelectionResult(seeds=seeds, gains=(), method="pagerank")
