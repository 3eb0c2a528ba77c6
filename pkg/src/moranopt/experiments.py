"""Experiment harness: fitness landscapes, method sweeps, dataset ingestion.

A sweep evaluates each selection method over a grid of budgets ``k`` and
fitness ranges ``m_max``.  For every ``m_max`` one landscape is sampled
from the master seed and shared by all methods, so the comparison is on
identical ground; every stochastic stage (landscape, selection, estimate)
draws from its own seed folded out of ``(master_seed, stage, cell)``, so a
sweep is reproducible byte for byte.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .errors import BadRange, NotStronglyConnected, ParseError
from .estimator import EstimatorConfig, estimate_fp
from .graphs import FitnessGraph, build_graph, summary, with_fitness
from .io import parse_edge_list, _label_table
from .process import mask_from_nodes
from .selection import (
    baseline_min_closeness,
    baseline_min_degree,
    baseline_min_pagerank,
    baseline_random,
    greedy_select,
    mc_evaluator,
)

logger = logging.getLogger("moranopt")

_U64 = (1 << 64) - 1
_TAG_FITNESS, _TAG_SELECT, _TAG_ESTIMATE = 1, 2, 3

SWEEP_COLUMNS = ("dataset", "method", "k", "m_max", "fp_hat", "ci_low", "ci_high")


def _mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return (z ^ (z >> 31)) & _U64


def fold_seed(*parts: int) -> int:
    """Deterministically fold integer coordinates into one 64-bit seed."""
    s = 0x243F6A8885A308D3
    for p in parts:
        s = _mix64(s ^ (p & _U64))
    return s


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: which methods, budgets, and fitness ranges to evaluate."""

    dataset: str
    methods: tuple[str, ...]
    k_grid: tuple[int, ...]
    fitness_mode: str = "sampled"      # "sampled" draws m ~ U(1, m_max); "explicit" keeps the graph's own
    m_max_grid: tuple[float, ...] = (1.1,)
    runs: int = 5000
    select_runs: int | None = None     # greedy's per-candidate budget; defaults to `runs`
    master_seed: int = 0
    step_cap: int | None = None

    def __post_init__(self):
        if not self.methods or not self.k_grid:
            raise ValueError("methods and k_grid must be nonempty")
        if self.fitness_mode not in ("sampled", "explicit"):
            raise ValueError(f"unknown fitness_mode {self.fitness_mode!r}")
        if self.fitness_mode == "sampled" and (not self.m_max_grid or min(self.m_max_grid) < 1.0):
            raise BadRange("sampled mode needs a nonempty m_max grid with every value >= 1")
        unknown = set(self.methods) - set(_SELECTORS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass(frozen=True)
class SweepRow:
    dataset: str
    method: str
    k: int
    m_max: float
    fp_hat: float
    ci_low: float
    ci_high: float


def sample_fitness(g: FitnessGraph, m_max: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Residents at 1, mutants i.i.d. uniform on [1, m_max]; always mutant-biased."""
    if m_max < 1.0:
        raise BadRange(f"m_max must be >= 1, got {m_max}")
    return rng.uniform(1.0, m_max, g.n), np.ones(g.n)


def _select_for_sweep(method: str, g: FitnessGraph, spec: ExperimentSpec, i_mmax: int) -> dict[int, tuple[int, ...]]:
    """Seed sets per budget; greedy and ranked baselines reuse one ordering's prefixes."""
    k_max = min(max(spec.k_grid), g.n)
    if k_max == 0:
        return {k: () for k in spec.k_grid}
    sel_seed = fold_seed(spec.master_seed, _TAG_SELECT, i_mmax, _SELECTORS[method])
    if method == "greedy":
        runs = spec.select_runs if spec.select_runs is not None else spec.runs
        res = greedy_select(g, k_max, mc_evaluator(g, runs=runs, step_cap=spec.step_cap),
                            master_seed=sel_seed)
        ordered = res.seeds
    elif method == "random":
        out = {}
        for k in spec.k_grid:
            rng = np.random.default_rng(fold_seed(sel_seed, k))
            out[k] = baseline_random(g, k, rng).seeds
        return out
    elif method == "degree":
        ordered = baseline_min_degree(g, k_max).seeds
    elif method == "closeness":
        ordered = baseline_min_closeness(g, k_max).seeds
    else:
        ordered = baseline_min_pagerank(g, k_max).seeds
    return {k: ordered[: min(k, g.n)] for k in spec.k_grid}


_SELECTORS = {"greedy": 0, "random": 1, "degree": 2, "closeness": 3, "pagerank": 4}


def run_sweep(spec: ExperimentSpec, g: FitnessGraph) -> list[SweepRow]:
    """Evaluate every (method, k, m_max) cell; rows come back in that order."""
    rows: list[SweepRow] = []
    mmax_grid = spec.m_max_grid if spec.fitness_mode == "sampled" else (summary(g).m_max,)
    for i_mmax, m_max in enumerate(mmax_grid):
        if spec.fitness_mode == "sampled":
            rng = np.random.default_rng(fold_seed(spec.master_seed, _TAG_FITNESS, i_mmax))
            land = with_fitness(g, *sample_fitness(g, m_max, rng))
        else:
            land = g
        for method in spec.methods:
            seed_sets = _select_for_sweep(method, land, spec, i_mmax)
            for k in spec.k_grid:
                cfg = EstimatorConfig(
                    fixed_runs=spec.runs,
                    step_cap=spec.step_cap,
                    master_seed=fold_seed(spec.master_seed, _TAG_ESTIMATE, i_mmax,
                                          _SELECTORS[method], k),
                )
                est = estimate_fp(land, mask_from_nodes(seed_sets[k]), cfg)
                rows.append(SweepRow(spec.dataset, method, k, m_max,
                                     est.fp_hat, est.ci_low, est.ci_high))
    rows.sort(key=lambda r: (spec.methods.index(r.method), r.k, r.m_max))
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.dataset, r.method, r.k, repr(float(r.m_max)),
                         repr(r.fp_hat), repr(r.ci_low), repr(r.ci_high)])
    return buf.getvalue()


# -- dataset ingestion ----------------------------------------------------------

def ingest_dataset(path, condense_scc: bool = True) -> FitnessGraph:
    """Lenient real-world ingestion: aggregate, normalize, and condense.

    Duplicate arcs sum their weights (contact counts), self-loops are
    dropped with a warning, raw weights become per-node distributions, and
    an undirected-but-weighted input turns into the symmetric directed
    graph its frequencies define.  Directed inputs that are not strongly
    connected are cut down to their largest strongly connected component
    (logged) unless ``condense_scc`` is off, in which case the error names
    that component.
    """
    rows, directed = parse_edge_list(path)
    mapping, labels = _label_table(t for u, v, _ in rows for t in (u, v))
    n = len(mapping)
    if labels is None:
        labels = tuple(str(i) for i in range(n))

    weighted = any(w is not None for _, _, w in rows)
    raw: dict[tuple[int, int], float] = {}
    dropped_loops = 0
    for u_lbl, v_lbl, w in rows:
        u, v = mapping[u_lbl], mapping[v_lbl]
        if u == v:
            dropped_loops += 1
            continue
        w = 1.0 if w is None else w
        if w <= 0:
            raise ParseError(f"non-positive weight on arc {u_lbl!r}->{v_lbl!r}")
        raw[(u, v)] = raw.get((u, v), 0.0) + w
        if not directed:
            raw[(v, u)] = raw.get((v, u), 0.0) + w
    if dropped_loops:
        logger.warning("dropped %d self-loop rows", dropped_loops)
    if not raw:
        raise ParseError("no usable arcs after cleaning")

    keep = _largest_scc_filter(n, raw, labels, condense_scc)
    if keep is not None:
        old_ids = sorted(keep)
        remap = {old: new for new, old in enumerate(old_ids)}
        raw = {(remap[u], remap[v]): w for (u, v), w in raw.items() if u in keep and v in keep}
        labels = tuple(labels[i] for i in old_ids)
        n = len(old_ids)

    out_sum = np.zeros(n)
    for (u, _), w in raw.items():
        out_sum[u] += w
    edges = [(u, v, w / out_sum[u]) for (u, v), w in sorted(raw.items())]
    # a weighted symmetric edge set yields non-uniform rows, which is a
    # directed graph in this model's sense
    as_directed = directed or weighted
    if not as_directed:
        edges = [(u, v, w) for (u, v, w) in edges if u < v]
    return build_graph(edges, as_directed, np.ones(n), np.ones(n), labels=labels)


def _largest_scc_filter(n, raw, labels, condense_scc):
    """None when already strongly connected, else the largest SCC's node set."""
    from .graphs import strongly_connected_components

    adj = [[] for _ in range(n)]
    for (u, v) in raw:
        adj[u].append(v)
    indptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        indptr[u + 1] = indptr[u] + len(adj[u])
    targets = np.empty(indptr[-1], dtype=np.int64)
    for u in range(n):
        targets[indptr[u]:indptr[u + 1]] = adj[u]
    shell = FitnessGraph(n=n, indptr=indptr, targets=targets,
                         weights=np.ones(indptr[-1]), m=np.ones(n), r=np.ones(n),
                         directed=True, labels=labels)
    comps = strongly_connected_components(shell)
    if len(comps) == 1:
        return None
    largest = comps[0]
    sample = ", ".join(labels[i] for i in sorted(largest)[:5])
    if not condense_scc:
        raise NotStronglyConnected(
            f"graph has {len(comps)} strongly connected components; "
            f"largest has {len(largest)} nodes (e.g. {sample})")
    logger.warning("condensing to largest SCC: %d of %d nodes kept", len(largest), n)
    return set(largest)
