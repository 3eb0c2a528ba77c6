"""Set-cover reduction instances and their fixation-probability bounds.

The construction maps a set-cover instance onto a bipartite fitness graph:
one node per set (group V1, mutant fitness ``x >= 1``), one node per
element (group V2, mutant fitness ``y <= 1``), arcs from each set to its
elements and from every element to every set, uniform out-weights, and
resident fitness 1 everywhere.  Whether a seed inside V1 covers the
universe then separates its fixation probability across a provable gap:

* not a cover:  fp <= 1 - (1 / (1 + n(n-1) y))^n
* a cover:      fp >= (q p* / (1 - (1-q) p*))^n,
                with  p* = (x / (x + n^2))^n  and  q = y / n^2,

where ``n`` is the total node count.  The two parameter regimes trade the
size of the gap against mutant bias: the general regime keeps both values
polynomial, while the mutant-biased regime pins ``y = 1`` and needs
``x = n^(2n+7)``, stored as (base, exponent) so its description stays
polynomially long.  All bound arithmetic runs in log space so those
extreme values remain evaluable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import EmptySet, EpsOutOfRange
from .graphs import FitnessGraph, build_graph

_VALIDATION_STEPS = 200


@dataclass(frozen=True)
class SetCoverInstance:
    universe: frozenset
    sets: tuple[frozenset, ...]
    k: int

    def __post_init__(self):
        if not self.sets:
            raise EmptySet("instance has no sets")
        if any(len(a) == 0 for a in self.sets):
            raise EmptySet("instance contains an empty set")
        union = frozenset().union(*self.sets)
        if not self.universe:
            object.__setattr__(self, "universe", union)
        elif self.universe != union:
            raise EmptySet("universe must equal the union of the sets")
        if not (0 <= self.k <= len(self.sets)):
            raise ValueError(f"budget k={self.k} outside [0, {len(self.sets)}]")

    @property
    def n_total(self) -> int:
        """Node count of the reduction graph: |sets| + |universe|."""
        return len(self.sets) + len(self.universe)

    def element_order(self) -> list:
        return sorted(self.universe, key=lambda e: (e.__class__.__name__, e))


@dataclass(frozen=True)
class ReductionParams:
    """Fitness parameters (x on sets, y on elements), x held as a natural log."""

    y: float
    x_log: float
    regime: str  # "general" | "mutant_biased"
    x_base: int | None = None
    x_exponent: int | None = None

    @property
    def x(self) -> float:
        return math.inf if self.x_log > 709.0 else math.exp(self.x_log)

    def describe_x(self) -> str:
        if self.x_base is not None:
            return f"{self.x_base}^{self.x_exponent}"
        return repr(self.x)


def is_cover(inst: SetCoverInstance, chosen: Iterable[int]) -> bool:
    """True iff the union of the chosen sets (indices into ``inst.sets``) is the universe."""
    union: frozenset = frozenset()
    for i in chosen:
        union |= inst.sets[i]
    return union == inst.universe


def build_reduction_graph(inst: SetCoverInstance, params: ReductionParams) -> FitnessGraph:
    """Materialize the bipartite fitness graph; set nodes come first in id order.

    Arc weights are uniform over out-neighbors.  Extreme mutant-biased
    parameters may exceed float range; those instances exist for log-space
    bound evaluation only and cannot be materialized.
    """
    x = params.x
    if not math.isfinite(x):
        raise OverflowError("x exceeds float range; evaluate bounds in log space instead")
    n1 = len(inst.sets)
    elements = inst.element_order()
    elem_id = {e: n1 + i for i, e in enumerate(elements)}
    n = n1 + len(elements)

    edges: list[tuple[int, int, float]] = []
    for i, a in enumerate(inst.sets):
        w = 1.0 / len(a)
        for e in sorted(a, key=lambda e: (e.__class__.__name__, e)):
            edges.append((i, elem_id[e], w))
    w2 = 1.0 / n1
    for e in elements:
        for i in range(n1):
            edges.append((elem_id[e], i, w2))

    m = [x] * n1 + [params.y] * len(elements)
    r = [1.0] * n
    labels = [f"set{i}" for i in range(n1)] + [f"elem:{e}" for e in elements]
    return build_graph(edges, True, m, r, labels=labels)


# -- closed-form bounds -------------------------------------------------------------

def noncover_escape_bound(n: int, y: float, v1_size: int) -> float:
    """Probability floor for clearing every set-node mutant while an uncovered
    element stays resident: ((1/n) / (1/n + (n-1) y))^v1_size."""
    q = (1.0 / n) / (1.0 / n + (n - 1) * y)
    return q**v1_size


def cover_sweep_bound(n: int, x: float, v2_size: int) -> float:
    """Probability floor for a cover's set-mutants converting all of V2 before
    losing ground: ((x/n) / (x/n + n))^v2_size."""
    q = (x / n) / (x / n + n)
    return q**v2_size


def log_lower_bound(zeta: float) -> float:
    """Certified lower bound 1/(zeta+1) <= ln(1 + 1/zeta), any zeta > 0."""
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    return 1.0 / (zeta + 1.0)


def prob_power_threshold(p: float, n: int) -> float:
    """Largest certified beta with (1/(1+beta))^n >= p, namely ln(1/p)/n."""
    if not (0 < p < 1):
        raise ValueError("p must lie in (0,1)")
    return math.log(1.0 / p) / n


def separation_bounds_log(n: int, y: float, x_log: float) -> tuple[float, float]:
    """Log-space pair: (ln(1 - upper_if_not_cover), ln(lower_if_cover)).

    Exact in the regimes where the plain values saturate at 0 or 1, which
    is what the extreme mutant-biased parameters require.
    """
    if n < 2:
        raise ValueError("bounds are defined for n >= 2")
    if not (0 < y <= 1):
        raise ValueError("y must lie in (0, 1]")
    log1m_upper = -n * math.log1p(n * (n - 1) * y)

    # s = -ln p*  with p* = (x / (x + n^2))^n; n^2/x in log space for huge x
    ratio = math.exp(math.log(float(n * n)) - x_log)
    s = n * math.log1p(ratio)
    q = y / (n * n)
    # 1 - (1-q) p*  =  q + (1-q)(1 - p*); dividing by q before the log
    # avoids the cancellation that swamps the bound when p* -> 1
    one_minus_pstar = -math.expm1(-s)
    log_lower = n * (-s - math.log1p((1.0 - q) * one_minus_pstar / q))
    return log1m_upper, log_lower


def separation_bounds(n: int, x: float | None = None, y: float = 1.0, x_log: float | None = None) -> tuple[float, float]:
    """(upper_if_not_cover, lower_if_cover) as plain probabilities.

    Pass either ``x`` or its natural log.  Values computed from the
    log-space forms, so they degrade gracefully (0 or 1) instead of
    overflowing when ``x`` is astronomically large.
    """
    if (x is None) == (x_log is None):
        raise ValueError("pass exactly one of x, x_log")
    if x_log is None:
        if x < 1:
            raise ValueError("x must be >= 1")
        x_log = math.log(x)
    log1m_upper, log_lower = separation_bounds_log(n, y, x_log)
    return -math.expm1(log1m_upper), math.exp(log_lower)


# -- parameter choices ---------------------------------------------------------------

def params_general(n: int, eps: float) -> ReductionParams:
    """Polynomial parameters putting the cover/non-cover gap at (eps, 1-eps).

    Follows the closed-form chain: ``y = ln(1/(1-eps)) / (n^2 (n-1))`` and
    ``x = n^3 / ln(1 + y c / n^3)`` with ``c = ln(1/(1-eps))``, then
    validates both bound inequalities numerically and tightens by
    bisection/doubling if float rounding leaves one unsatisfied.
    """
    if not (0.0 < eps < 0.5):
        raise EpsOutOfRange(f"eps must lie in (0, 1/2), got {eps}")
    if n < 2:
        raise ValueError("n >= 2 required")
    c = -math.log1p(-eps)  # ln(1/(1-eps))

    # n(n-1) y plays the beta role against p = 1-eps
    y = prob_power_threshold(1.0 - eps, n) / (n * (n - 1))
    for _ in range(_VALIDATION_STEPS):
        upper, _ = separation_bounds(n, x=1.0, y=y)
        if upper <= eps:
            break
        y /= 2.0
    else:
        raise EpsOutOfRange(f"could not satisfy the non-cover bound at eps={eps}")

    x = (n**3) / math.log1p(y * c / n**3)
    lo = None
    for _ in range(_VALIDATION_STEPS):
        _, lower = separation_bounds(n, x=x, y=y)
        if lower > 1.0 - eps:
            break
        lo, x = x, x * 2.0
    else:
        raise EpsOutOfRange(f"could not satisfy the cover bound at eps={eps}")
    if lo is not None:
        # doubling overshot; bisect back toward the smallest valid x
        hi = x
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if separation_bounds(n, x=mid, y=y)[1] > 1.0 - eps:
                hi = mid
            else:
                lo = mid
        x = hi

    upper, lower = separation_bounds(n, x=x, y=y)
    assert upper <= eps and lower > 1.0 - eps
    return ReductionParams(y=y, x_log=math.log(x), regime="general")


def params_mutant_biased(n: int) -> ReductionParams:
    """Mutant-biased regime: y = 1 and x = n^(2n+7), kept as (base, exponent)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    exponent = 2 * n + 7
    return ReductionParams(
        y=1.0,
        x_log=exponent * math.log(n),
        regime="mutant_biased",
        x_base=n,
        x_exponent=exponent,
    )
