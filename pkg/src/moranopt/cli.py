"""Command-line interface.

Subcommands: ``simulate``, ``exact``, ``estimate``, ``select``, ``sweep``,
``verify``, ``reduce``.  All output is RFC-4180 CSV on stdout or ``--out``;
every stochastic path is keyed off ``--seed`` so identical invocations
produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .errors import MoranOptError
from .estimator import EstimatorConfig, estimate_fp
from .exact import exhaustive_opt, fixation_table
from .experiments import ExperimentSpec, fold_seed, ingest_dataset, rows_to_csv, run_sweep, sample_fitness
from .graphs import FitnessGraph, with_fitness
from .hardness import build_reduction_graph, separation_bounds, separation_bounds_log, params_general, params_mutant_biased
from .io import load_set_cover, read_fitness, write_edge_list, write_fitness
from .process import full_mask, mask_from_nodes
from .generators import random_fitness_graph
from .selection import (
    baseline_min_closeness,
    baseline_min_degree,
    baseline_min_pagerank,
    baseline_random,
    exact_evaluator,
    greedy_select,
    mc_evaluator,
)
from .verify import check_loopy_equivalence, check_monotonicity, check_submodularity, check_time_bound


def _add_graph_options(p: argparse.ArgumentParser):
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--fitness", help="fitness file (node m r rows)")
    p.add_argument("--sample-mmax", type=float,
                   help="sample m ~ U(1, M) from --seed instead of a fitness file")
    p.add_argument("--no-condense", action="store_true",
                   help="fail instead of condensing to the largest strongly connected component")


def _load_graph(args) -> FitnessGraph:
    g = ingest_dataset(args.graph, condense_scc=not args.no_condense)
    if args.fitness and args.sample_mmax:
        raise MoranOptError("--fitness and --sample-mmax are mutually exclusive")
    if args.fitness:
        g = read_fitness(args.fitness, g)
    elif args.sample_mmax:
        rng = np.random.default_rng(fold_seed(args.seed, 1))
        g = with_fitness(g, *sample_fitness(g, args.sample_mmax, rng))
    return g


def _parse_nodes(g: FitnessGraph, spec: str) -> int:
    by_label = {g.label_of(u): u for u in range(g.n)}
    nodes = []
    for tok in spec.split(","):
        tok = tok.strip()
        if tok == "":
            continue
        if tok not in by_label:
            raise MoranOptError(f"unknown node {tok!r}")
        nodes.append(by_label[tok])
    return mask_from_nodes(nodes)


def _seed_label(g: FitnessGraph, mask: int) -> str:
    return " ".join(g.label_of(u) for u in range(g.n) if (mask >> u) & 1)


@contextmanager
def _output(args):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            yield csv.writer(fh, lineterminator="\n")
    else:
        yield csv.writer(sys.stdout, lineterminator="\n")


def _estimator_config(args, master_seed: int) -> EstimatorConfig:
    eps = getattr(args, "epsilon", None)
    delta = getattr(args, "delta", None)
    fixed = args.runs if (eps is None and delta is None) else None
    return EstimatorConfig(epsilon=eps, delta=delta, fixed_runs=fixed,
                           step_cap=args.step_cap, master_seed=master_seed)


# -- subcommands -------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    from . import _kernels
    from .process import default_step_cap, mask_to_array

    g = _load_graph(args)
    mask = _parse_nodes(g, args.seed_set)
    runs = args.runs or 1
    cap = args.step_cap or default_step_cap(g)
    fixed, capped, steps = _kernels.run_batch(
        g.indptr, g.targets, g.weights, g.m, g.r, mask_to_array(mask, g.n),
        np.int64(cap), np.uint64(args.seed & (2**64 - 1)), np.int64(runs))
    with _output(args) as w:
        w.writerow(["run", "fixed", "capped", "steps"])
        for i in range(runs):
            w.writerow([i, int(fixed[i]), int(capped[i]), int(steps[i])])
    return 0


def _cmd_exact(args) -> int:
    g = _load_graph(args)
    table = fixation_table(g, kernel=args.kernel, with_times=args.times)
    if args.all:
        masks = range(full_mask(g.n) + 1)
    else:
        if not args.seed_set:
            raise MoranOptError("pass --seed-set (repeatable) or --all")
        masks = [_parse_nodes(g, s) for s in args.seed_set]
    with _output(args) as w:
        header = ["seed_set", "fp"] + (["expected_steps"] if args.times else [])
        w.writerow(header)
        for mask in masks:
            row = [_seed_label(g, mask), repr(float(table.fp[mask]))]
            if args.times:
                row.append(repr(float(table.expected_steps[mask])))
            w.writerow(row)
    return 0


def _cmd_estimate(args) -> int:
    g = _load_graph(args)
    if not args.seed_set:
        raise MoranOptError("pass at least one --seed-set")
    with _output(args) as w:
        w.writerow(["seed_set", "fp_hat", "ci_low", "ci_high", "runs", "capped", "mean_steps", "seed"])
        for i, spec in enumerate(args.seed_set):
            mask = _parse_nodes(g, spec)
            cfg = _estimator_config(args, fold_seed(args.seed, 2, i))
            est = estimate_fp(g, mask, cfg)
            w.writerow([_seed_label(g, mask), repr(est.fp_hat), repr(est.ci_low),
                        repr(est.ci_high), est.runs, est.capped_runs,
                        repr(est.mean_steps), args.seed])
    return 0


def _cmd_select(args) -> int:
    g = _load_graph(args)
    if args.method == "greedy":
        if args.evaluator == "exact":
            ev = exact_evaluator(g)
        else:
            ev = mc_evaluator(g, runs=args.select_runs or args.runs or 5000, step_cap=args.step_cap)
        res = greedy_select(g, args.k, ev, master_seed=fold_seed(args.seed, 3))
    elif args.method == "random":
        res = baseline_random(g, args.k, np.random.default_rng(fold_seed(args.seed, 3)))
    elif args.method == "degree":
        res = baseline_min_degree(g, args.k)
    elif args.method == "closeness":
        res = baseline_min_closeness(g, args.k)
    elif args.method == "pagerank":
        res = baseline_min_pagerank(g, args.k)
    else:  # exhaustive reference oracle
        mask, _ = exhaustive_opt(g, args.k)
        from .process import nodes_from_mask
        res_seeds = nodes_from_mask(mask)
        from .selection import SelectionResult
        res = SelectionResult(seeds=res_seeds, gains=(), method="exhaustive")
    mask = mask_from_nodes(res.seeds)
    est = estimate_fp(g, mask, _estimator_config(args, fold_seed(args.seed, 4)))
    with _output(args) as w:
        w.writerow(["method", "k", "seeds", "fp_hat", "ci_low", "ci_high"])
        w.writerow([res.method, args.k, _seed_label(g, mask),
                    repr(est.fp_hat), repr(est.ci_low), repr(est.ci_high)])
    return 0


def _cmd_sweep(args) -> int:
    g = _load_graph(args)
    spec = ExperimentSpec(
        dataset=args.dataset,
        methods=tuple(args.methods.split(",")),
        k_grid=tuple(int(x) for x in args.k_grid.split(",")),
        fitness_mode="sampled" if args.mmax_grid else "explicit",
        m_max_grid=tuple(float(x) for x in args.mmax_grid.split(",")) if args.mmax_grid else (1.0,),
        runs=args.runs or 5000,
        select_runs=args.select_runs,
        master_seed=args.seed,
        step_cap=args.step_cap,
    )
    text = rows_to_csv(run_sweep(spec, g))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    checks = {
        "monotone": lambda g, i: check_monotonicity(g, tol=args.tol),
        "submodular": lambda g, i: check_submodularity(g, tol=args.tol),
        "loopy": lambda g, i: check_loopy_equivalence(g, tol=min(args.tol, 1e-10)),
        "timebound": lambda g, i: check_time_bound(g, runs=args.runs or 10_000,
                                                   master_seed=fold_seed(args.seed, 7, i)),
    }
    if args.property == "timebound" and args.bias != "mutant":
        raise MoranOptError("timebound applies to undirected mutant-biased graphs; use --bias mutant")
    rows = []
    for i in range(args.instances):
        rng = np.random.default_rng(fold_seed(args.seed, 6, i))
        g = random_fitness_graph(rng, args.n, directed=args.directed, bias=args.bias)
        v = checks[args.property](g, i)
        rows.append([v.property, i, args.n, int(args.directed), args.bias,
                     v.instances_checked, len(v.violations), v.inconclusive,
                     "pass" if v.passed else "FAIL"])
    with _output(args) as w:
        w.writerow(["property", "instance", "n", "directed", "bias",
                    "checked", "violations", "inconclusive", "status"])
        w.writerows(rows)
    return 0 if all(r[-1] == "pass" for r in rows) else 1


def _cmd_reduce(args) -> int:
    inst = load_set_cover(args.instance)
    n = inst.n_total
    params = params_general(n, args.eps) if args.regime == "general" else params_mutant_biased(n)
    upper, lower = separation_bounds(n, x_log=params.x_log, y=params.y)
    log1m_upper, log_lower = separation_bounds_log(n, params.y, params.x_log)
    if args.out_prefix:
        g = build_reduction_graph(inst, params)
        write_edge_list(g, args.out_prefix + ".edges.tsv")
        write_fitness(g, args.out_prefix + ".fitness.tsv")
    with _output(args) as w:
        w.writerow(["regime", "n", "k", "y", "x", "x_log",
                    "upper_not_cover", "lower_cover", "log1m_upper", "log_lower"])
        w.writerow([params.regime, n, inst.k, repr(params.y), params.describe_x(),
                    repr(params.x_log), repr(upper), repr(lower),
                    repr(log1m_upper), repr(log_lower)])
    return 0


# -- parser ----------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moranopt", description=__doc__)
    p.add_argument("--version", action="version", version=f"moranopt {__version__}")
    p.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    p.add_argument("--threads", type=int, help="simulation thread count")
    p.add_argument("--step-cap", type=int, help="per-trajectory step cap override")
    p.add_argument("--runs", type=int, help="Monte Carlo run count override")
    p.add_argument("--out", help="write CSV here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="raw trajectories from one seed set")
    _add_graph_options(sp)
    sp.add_argument("--seed-set", required=True, help="comma-separated node labels")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("exact", help="absorbing-chain fixation probabilities")
    _add_graph_options(sp)
    sp.add_argument("--seed-set", action="append", help="repeatable; comma-separated labels")
    sp.add_argument("--all", action="store_true", help="every configuration")
    sp.add_argument("--times", action="store_true", help="also report expected absorption steps")
    sp.add_argument("--kernel", choices=["base", "loopy"], default="base")
    sp.set_defaults(func=_cmd_exact)

    sp = sub.add_parser("estimate", help="Monte Carlo fixation estimates")
    _add_graph_options(sp)
    sp.add_argument("--seed-set", action="append", help="repeatable; comma-separated labels")
    sp.add_argument("--epsilon", type=float, help="additive accuracy target")
    sp.add_argument("--delta", type=float, help="failure probability")
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("select", help="pick a seed set")
    _add_graph_options(sp)
    sp.add_argument("--method", required=True,
                    choices=["greedy", "random", "degree", "closeness", "pagerank", "exhaustive"])
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--evaluator", choices=["exact", "mc"], default="mc",
                    help="greedy's fp oracle")
    sp.add_argument("--select-runs", type=int, help="greedy per-candidate run budget")
    sp.set_defaults(func=_cmd_select)

    sp = sub.add_parser("sweep", help="method-by-budget experiment grid")
    _add_graph_options(sp)
    sp.add_argument("--dataset", default="dataset", help="name for the CSV rows")
    sp.add_argument("--methods", default="greedy,random,degree,closeness,pagerank")
    sp.add_argument("--k-grid", default="1,5,10,15,20")
    sp.add_argument("--mmax-grid", help="e.g. 1.05,1.1,1.25,1.5,2.0; omit to keep the graph's fitness")
    sp.add_argument("--select-runs", type=int)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("verify", help="audit structural properties on random instances")
    sp.add_argument("--property", required=True,
                    choices=["monotone", "submodular", "loopy", "timebound"])
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--instances", type=int, default=20)
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("--bias", choices=["mutant", "resident", "neutral", "arbitrary"],
                    default="arbitrary")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("reduce", help="build a set-cover hardness instance")
    sp.add_argument("--instance", required=True, help="JSON file: {sets: [[...]], k: int}")
    sp.add_argument("--regime", choices=["general", "biased"], default="general")
    sp.add_argument("--eps", type=float, default=0.25, help="gap parameter for the general regime")
    sp.add_argument("--out-prefix", help="also write <prefix>.edges.tsv and <prefix>.fitness.tsv")
    sp.set_defaults(func=_cmd_reduce)

    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.threads:
        from . import _kernels
        _kernels.set_threads(args.threads)
    try:
        return args.func(args)
    except MoranOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
