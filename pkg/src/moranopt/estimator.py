"""Monte Carlo estimation of fixation probabilities with explicit accuracy budgets.

Runs are independent trajectories on counter-based per-run RNG streams, so
an estimate depends only on ``(master_seed, run count)`` and never on
scheduling.  Runs that hit the step cap are excluded from the point
estimate (counting them as extinction would bias it downward) and are
surfaced separately in the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

from . import _kernels
from .errors import AllRunsCapped, NotApplicable
from .graphs import FitnessGraph, is_mutant_biased, summary
from .process import default_step_cap, full_mask, mask_to_array

#: Default run count when neither an (epsilon, delta) budget nor fixed_runs is given.
DEFAULT_RUNS = 5000

_Z95 = 1.959963984540054

#: absorption-time bounds saturate here by default
BOUND_CEILING = 10**18


@dataclass(frozen=True)
class EstimatorConfig:
    """Accuracy/budget knobs for :func:`estimate_fp`.

    Exactly one of (``epsilon``, ``delta``) pair or ``fixed_runs`` decides
    the run count; with neither, ``DEFAULT_RUNS`` applies.  ``step_cap``
    defaults to the graph-dependent cap from
    :func:`moranopt.process.default_step_cap`.
    """

    epsilon: float | None = None
    delta: float | None = None
    fixed_runs: int | None = None
    step_cap: int | None = None
    master_seed: int = 0

    def __post_init__(self):
        if (self.epsilon is None) != (self.delta is None):
            raise ValueError("epsilon and delta must be given together")
        if self.epsilon is not None and not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0,1)")
        if self.fixed_runs is not None and self.fixed_runs <= 0:
            raise ValueError("fixed_runs must be positive")

    def runs(self) -> int:
        if self.fixed_runs is not None:
            return self.fixed_runs
        if self.epsilon is not None:
            return sample_budget(self.epsilon, self.delta)
        return DEFAULT_RUNS

    def z_value(self) -> float:
        if self.delta is None:
            return _Z95
        return float(scipy.stats.norm.ppf(1.0 - self.delta / 2.0))


@dataclass(frozen=True)
class FixationEstimate:
    fp_hat: float
    ci_low: float
    ci_high: float
    runs: int
    fixations: int
    capped_runs: int
    mean_steps: float


def sample_budget(epsilon: float, delta: float) -> int:
    """Smallest N with P(|fp_hat - fp| > epsilon) <= delta for a Bernoulli mean.

    Hoeffding: N = ceil(ln(2/delta) / (2 epsilon^2)), floored at one run.
    """
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("epsilon and delta must lie in (0,1)")
    return max(1, math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon)))


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; stays sane when the rate sits at 0 or 1."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    # at the boundary rates the touched end is exactly the rate; rounding in
    # the sqrt otherwise leaves ~1e-18 of dust on it
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def estimate_fp(g: FitnessGraph, seed, config: EstimatorConfig | None = None) -> FixationEstimate:
    """Estimate the fixation probability of a seed configuration.

    ``seed`` is a bitmask or an iterable of node ids.  Absorbing seeds
    (empty/full) are deterministic and short-circuit to an exact,
    zero-width answer.  Raises :class:`AllRunsCapped` when no run reached
    absorption within the step cap.
    """
    config = config or EstimatorConfig()
    mask = seed if isinstance(seed, int) else _as_mask(seed)
    n_runs = config.runs()

    if mask == 0 or mask == full_mask(g.n):
        fp = 1.0 if mask else 0.0
        return FixationEstimate(fp, fp, fp, n_runs, n_runs if mask else 0, 0, 0.0)

    cap = config.step_cap if config.step_cap is not None else default_step_cap(g)
    fixed, capped, steps = _kernels.run_batch(
        g.indptr, g.targets, g.weights, g.m, g.r,
        mask_to_array(mask, g.n),
        np.int64(cap),
        np.uint64(config.master_seed & 0xFFFFFFFFFFFFFFFF),
        np.int64(n_runs),
    )
    done = capped == 0
    uncapped = int(done.sum())
    if uncapped == 0:
        raise AllRunsCapped(f"all {n_runs} runs hit the {cap}-step cap")
    fixations = int(fixed[done].sum())
    fp_hat = fixations / uncapped
    lo, hi = wilson_interval(fixations, uncapped, config.z_value())
    return FixationEstimate(
        fp_hat=fp_hat,
        ci_low=lo,
        ci_high=hi,
        runs=n_runs,
        fixations=fixations,
        capped_runs=n_runs - uncapped,
        mean_steps=float(steps[done].mean()),
    )


def absorption_time_bound(g: FitnessGraph, ceiling: int = BOUND_CEILING) -> int:
    """Upper bound on the expected absorption time: (n^2 m_max / r_min)^3.

    Only meaningful on undirected mutant-biased graphs; saturates at
    ``ceiling`` to stay representable.
    """
    if g.directed or not is_mutant_biased(g):
        raise NotApplicable("bound holds on undirected mutant-biased graphs only")
    s = summary(g)
    bound = (float(g.n) ** 2 * s.m_max / s.r_min) ** 3
    return int(min(float(ceiling), math.ceil(bound)))


def _as_mask(nodes) -> int:
    mask = 0
    for u in nodes:
        mask |= 1 << int(u)
    return mask
