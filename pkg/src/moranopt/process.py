"""Birth-death dynamics on fitness graphs.

A configuration is the set of mutant nodes, held as an integer bitmask
(bit ``u`` set means node ``u`` is a mutant).  One step: a reproducer ``u``
is sampled with probability proportional to its current fitness, a target
``v`` is sampled from ``w(u, .)``, and ``v`` acquires ``u``'s type.
Absorbing configurations are the empty set (extinction) and the full set
(fixation).

The loopy reformulation makes every node reproduce at the same rate and
compensates by giving slower nodes heavier self-loops; conditioned on the
configuration changing, the two chains move identically, so fixation
probabilities agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DirectedGraphUnsupported
from .graphs import FitnessGraph, is_mutant_biased, out_degrees, summary

#: Row sums of every evaluated loopy distribution stay within this of 1.
KERNEL_ROW_TOLERANCE = 1e-12

#: Hard ceiling applied to every default step cap.
STEP_CAP_CEILING = 10**9

#: Default cap for graphs where no polynomial absorption bound is known.
STEP_CAP_UNBOUNDED = 10**8


# -- configuration helpers ------------------------------------------------------

def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_from_nodes(nodes: Iterable[int]) -> int:
    mask = 0
    for u in nodes:
        mask |= 1 << int(u)
    return mask


def nodes_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    u = 0
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return tuple(out)


def is_absorbing(mask: int, n: int) -> bool:
    return mask == 0 or mask == full_mask(n)


def mask_to_array(mask: int, n: int) -> np.ndarray:
    bits = np.zeros(n, dtype=np.uint8)
    for u in nodes_from_mask(mask):
        bits[u] = 1
    return bits


# -- step / trajectory ------------------------------------------------------------

@dataclass(frozen=True)
class StepOutcome:
    reproducer: int
    target: int
    changed: bool


@dataclass
class TrajectoryStats:
    fixed: bool
    steps: int
    capped: bool = False
    potential_trace: list[float] | None = None


def fitness_of(g: FitnessGraph, mask: int, u: int) -> float:
    """m(u) if u is a mutant in the configuration, else r(u)."""
    return float(g.m[u]) if (mask >> u) & 1 else float(g.r[u])


def fitness_vector(g: FitnessGraph, mask: int) -> np.ndarray:
    bits = mask_to_array(mask, g.n).astype(bool)
    return np.where(bits, g.m, g.r)


def total_fitness(g: FitnessGraph, mask: int) -> float:
    return float(fitness_vector(g, mask).sum())


def step(g: FitnessGraph, mask: int, rng: np.random.Generator) -> tuple[int, StepOutcome]:
    """One birth-death event; absorbing configurations are returned unchanged."""
    if is_absorbing(mask, g.n):
        return mask, StepOutcome(reproducer=-1, target=-1, changed=False)
    fit = fitness_vector(g, mask)
    cum = np.cumsum(fit)
    u = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    u = min(u, g.n - 1)
    tgts, wts = g.out_arcs(u)
    cw = np.cumsum(wts)
    j = int(np.searchsorted(cw, rng.random() * cw[-1], side="right"))
    v = int(tgts[min(j, len(tgts) - 1)])
    u_type = (mask >> u) & 1
    changed = ((mask >> v) & 1) != u_type
    if changed:
        mask = mask | (1 << v) if u_type else mask & ~(1 << v)
    return mask, StepOutcome(reproducer=u, target=v, changed=changed)


def run_to_absorption(
    g: FitnessGraph,
    seed_mask: int,
    rng: np.random.Generator,
    step_cap: int | None = None,
    record_potential: bool = False,
    potential_stride: int = 1,
) -> TrajectoryStats:
    """Iterate :func:`step` until fixation/extinction or the step cap.

    A capped trajectory is reported via ``capped=True`` (with ``fixed=False``);
    it is an outcome, not an error, and callers account for it separately.
    Potential tracing is opt-in and subsampled every ``potential_stride``
    steps to keep memory bounded.
    """
    cap = step_cap if step_cap is not None else default_step_cap(g)
    if cap <= 0:
        raise ValueError("step_cap must be positive")
    trace: list[float] | None = None
    if record_potential:
        trace = [potential_phi(g, seed_mask)]
    mask = seed_mask
    steps = 0
    while not is_absorbing(mask, g.n):
        if steps >= cap:
            return TrajectoryStats(fixed=False, steps=steps, capped=True, potential_trace=trace)
        mask, _ = step(g, mask, rng)
        steps += 1
        if trace is not None and steps % potential_stride == 0:
            trace.append(potential_phi(g, mask))
    return TrajectoryStats(fixed=mask == full_mask(g.n), steps=steps, potential_trace=trace)


def potential_phi(g: FitnessGraph, mask: int) -> float:
    """Sum of m(u)/d(u) over mutants; the submartingale behind the absorption-time bound."""
    if g.directed:
        raise DirectedGraphUnsupported("the potential uses undirected degrees")
    deg = out_degrees(g)
    return float(sum(g.m[u] / deg[u] for u in nodes_from_mask(mask)))


def default_step_cap(g: FitnessGraph) -> int:
    """Cubed polynomial bound on undirected mutant-biased graphs, else a flat cap.

    Non-biased graphs can take exponentially long to absorb, so there the cap
    is a guardrail and capped runs must be surfaced by callers.
    """
    if not g.directed and is_mutant_biased(g):
        s = summary(g)
        bound = (g.n**2 * s.m_max / s.r_min) ** 3
        return int(min(STEP_CAP_CEILING, np.ceil(bound)))
    return STEP_CAP_UNBOUNDED


# -- loopy reformulation -----------------------------------------------------------

@dataclass(frozen=True)
class LoopyKernel:
    """Configuration-dependent reweighting with uniform reproduction rates.

    For a configuration ``X`` the weight of arc ``(u, v)``, ``v != u``,
    becomes ``(f_X(u)/f_max) * w(u, v)`` and the remainder
    ``1 - f_X(u)/f_max`` sits on a self-loop (base graphs carry none).
    All node fitnesses under the kernel are the constant 1, so the
    reproducer is uniform.  Rows are evaluated lazily per configuration.
    """

    base: FitnessGraph
    f_max: float

    def self_loop(self, mask: int, u: int) -> float:
        return 1.0 - fitness_of(self.base, mask, u) / self.f_max

    def row(self, mask: int, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Targets and probabilities of ``u``'s outgoing distribution, self-loop last."""
        tgts, wts = self.base.out_arcs(u)
        scale = fitness_of(self.base, mask, u) / self.f_max
        targets = np.append(tgts, u)
        probs = np.append(wts * scale, 1.0 - scale)
        return targets, probs


def loopy_kernel(g: FitnessGraph) -> LoopyKernel:
    return LoopyKernel(base=g, f_max=summary(g).f_max)


def loopy_step(kernel: LoopyKernel, mask: int, rng: np.random.Generator) -> tuple[int, StepOutcome]:
    """One loopy event: uniform reproducer, target from the reweighted row."""
    g = kernel.base
    if is_absorbing(mask, g.n):
        return mask, StepOutcome(reproducer=-1, target=-1, changed=False)
    u = int(rng.integers(g.n))
    tgts, probs = kernel.row(mask, u)
    cw = np.cumsum(probs)
    j = int(np.searchsorted(cw, rng.random() * cw[-1], side="right"))
    v = int(tgts[min(j, len(tgts) - 1)])
    if v == u:
        return mask, StepOutcome(reproducer=u, target=u, changed=False)
    u_type = (mask >> u) & 1
    changed = ((mask >> v) & 1) != u_type
    if changed:
        mask = mask | (1 << v) if u_type else mask & ~(1 << v)
    return mask, StepOutcome(reproducer=u, target=v, changed=changed)


@dataclass(frozen=True, eq=False)
class TwoGraphsView:
    """Type-specific propagation weights: one row-stochastic matrix per type.

    ``w_m[u]`` is node ``u``'s outgoing distribution (self-loop included)
    when ``u`` is a mutant, ``w_r[u]`` when it is a resident; the loopy rule
    depends only on the source's own type, so this pair captures it exactly.
    """

    w_m: np.ndarray  # (n, n)
    w_r: np.ndarray  # (n, n)


def export_two_graphs(kernel: LoopyKernel) -> TwoGraphsView:
    g = kernel.base
    w_m = np.zeros((g.n, g.n))
    w_r = np.zeros((g.n, g.n))
    for u in range(g.n):
        tgts, wts = g.out_arcs(u)
        for mat, f in ((w_m, g.m[u]), (w_r, g.r[u])):
            scale = f / kernel.f_max
            mat[u, tgts] = wts * scale
            mat[u, u] = 1.0 - scale
    return TwoGraphsView(w_m=w_m, w_r=w_r)
