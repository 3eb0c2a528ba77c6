"""Executable verdicts for the structural properties of the fixation probability.

Each checker sweeps a family of seed-set pairs and reports a
:class:`Verdict` carrying every witnessed violation, so a failure is
reproducible from the record.  Exact mode reads a solved fixation table
(injectable, which is how the checkers themselves get negative-control
tested); Monte Carlo mode compares estimates at three combined standard
errors and files near-ties as inconclusive rather than failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TooLarge
from .estimator import EstimatorConfig, estimate_fp, absorption_time_bound
from .exact import ExactResult, fixation_table
from .graphs import FitnessGraph, is_mutant_biased, is_resident_biased
from .process import full_mask

EXACT_TOL = 1e-9
LOOPY_TOL = 1e-10
_EXACT_N_CAP = 14


@dataclass(frozen=True)
class Violation:
    witness: tuple[int, ...]
    lhs: float
    rhs: float
    detail: str


@dataclass
class Verdict:
    property: str
    instances_checked: int
    violations: list[Violation] = field(default_factory=list)
    tolerance: float = EXACT_TOL
    inconclusive: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


def _require_small(g: FitnessGraph, what: str):
    if g.n > _EXACT_N_CAP:
        raise TooLarge(f"exact {what} sweep needs n <= {_EXACT_N_CAP}, got {g.n}")


def check_monotonicity(
    g: FitnessGraph,
    mode: str = "exact",
    tol: float = EXACT_TOL,
    table: ExactResult | None = None,
    samples: int = 100,
    mc_runs: int = 2000,
    master_seed: int = 0,
) -> Verdict:
    """Adding seeds never hurts: fp(S) <= fp(S') for S a subset of S'.

    Exact mode sweeps every nested pair; mc mode samples ``samples`` pairs
    and widens the margin to three combined standard errors.
    """
    if mode == "exact":
        _require_small(g, "monotonicity")
        if table is None:
            table = fixation_table(g)
        fp = table.fp
        verdict = Verdict("monotonicity", 0, tolerance=tol)
        # every proper nested pair: 3^n - 2^n of them
        for sup in range(1, full_mask(g.n) + 1):
            sub = sup
            while True:
                sub = (sub - 1) & sup
                verdict.instances_checked += 1
                if fp[sub] > fp[sup] + tol:
                    verdict.violations.append(Violation(
                        (sub, sup), float(fp[sub]), float(fp[sup]),
                        f"fp({sub:#x}) > fp({sup:#x}) on nested seeds"))
                if sub == 0:
                    break
        return verdict

    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(master_seed)
    verdict = Verdict("monotonicity", 0, tolerance=3.0)
    full = full_mask(g.n)
    for i in range(samples):
        sup = int(rng.integers(1, full + 1))
        sub = int(rng.integers(0, full + 1)) & sup
        if sub == sup:
            continue
        e_sub = estimate_fp(g, sub, EstimatorConfig(fixed_runs=mc_runs, master_seed=master_seed + 2 * i))
        e_sup = estimate_fp(g, sup, EstimatorConfig(fixed_runs=mc_runs, master_seed=master_seed + 2 * i + 1))
        verdict.instances_checked += 1
        if e_sub.fp_hat <= e_sup.fp_hat:
            continue
        se = math.sqrt(_bernoulli_var(e_sub) + _bernoulli_var(e_sup))
        if e_sub.fp_hat - e_sup.fp_hat > 3.0 * se:
            verdict.violations.append(Violation(
                (sub, sup), e_sub.fp_hat, e_sup.fp_hat, "estimated gap beyond 3 SE"))
        else:
            verdict.inconclusive += 1
    return verdict


def _bernoulli_var(est) -> float:
    n = max(1, est.runs - est.capped_runs)
    p = est.fp_hat
    return p * (1.0 - p) / n


def check_submodularity(
    g: FitnessGraph,
    mode: str = "exact",
    tol: float = EXACT_TOL,
    direction: str = "auto",
    table: ExactResult | None = None,
) -> Verdict:
    """Diminishing returns: fp(S) + fp(T) >= fp(S|T) + fp(S&T) over all pairs.

    ``direction='auto'`` expects the inequality as written on mutant-biased
    graphs and reversed (supermodular) on resident-biased ones; graphs
    biased neither way are checked as submodular and may legitimately fail.
    """
    if mode != "exact":
        raise ValueError("submodularity sweeps are exact-mode only")
    _require_small(g, "submodularity")
    if direction == "auto":
        direction = "supermodular" if (is_resident_biased(g) and not is_mutant_biased(g)) else "submodular"
    if table is None:
        table = fixation_table(g)
    fp = table.fp

    masks = np.arange(full_mask(g.n) + 1, dtype=np.int64)
    s_grid, t_grid = np.meshgrid(masks, masks, indexing="ij")
    keep = s_grid <= t_grid
    s_arr, t_arr = s_grid[keep], t_grid[keep]
    lhs = fp[s_arr] + fp[t_arr]
    rhs = fp[s_arr | t_arr] + fp[s_arr & t_arr]
    gap = (lhs - rhs) if direction == "submodular" else (rhs - lhs)

    verdict = Verdict(direction, int(s_arr.size), tolerance=tol)
    for i in np.nonzero(gap < -tol)[0]:
        verdict.violations.append(Violation(
            (int(s_arr[i]), int(t_arr[i])), float(lhs[i]), float(rhs[i]),
            f"{direction} inequality fails"))
    return verdict


def check_loopy_equivalence(g: FitnessGraph, tol: float = LOOPY_TOL) -> Verdict:
    """Exact fixation probabilities under the base and loopy kernels agree per seed set."""
    _require_small(g, "loopy-equivalence")
    base = fixation_table(g, kernel="base").fp
    loopy = fixation_table(g, kernel="loopy").fp
    verdict = Verdict("loopy", int(base.size), tolerance=tol)
    for mask in np.nonzero(np.abs(base - loopy) > tol)[0]:
        verdict.violations.append(Violation(
            (int(mask),), float(base[mask]), float(loopy[mask]), "kernel fp mismatch"))
    return verdict


def check_time_bound(
    g: FitnessGraph,
    runs: int = 10_000,
    n_seed_sets: int = 3,
    master_seed: int = 0,
) -> Verdict:
    """Empirical mean absorption time stays under the cubed polynomial bound.

    Raises :class:`NotApplicable` on directed or non-mutant-biased graphs,
    where no such bound holds.
    """
    bound = absorption_time_bound(g)  # raises NotApplicable where undefined
    rng = np.random.default_rng(master_seed)
    full = full_mask(g.n)
    verdict = Verdict("timebound", 0, tolerance=float(bound))
    cap = int(min(10**9, 50 * bound))
    for i in range(n_seed_sets):
        mask = int(rng.integers(1, full + 1))
        est = estimate_fp(g, mask, EstimatorConfig(
            fixed_runs=runs, step_cap=cap, master_seed=master_seed + i))
        verdict.instances_checked += 1
        if est.mean_steps > bound:
            verdict.violations.append(Violation(
                (mask,), est.mean_steps, float(bound), "mean absorption time above bound"))
    return verdict
