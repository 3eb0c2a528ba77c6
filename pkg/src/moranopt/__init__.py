"""moranopt: heterogeneous Moran dynamics, fixation probabilities, and seed selection.

The package models populations as fitness graphs (weighted directed graphs
with per-node mutant/resident fitness), simulates the birth-death process
on them, computes fixation probabilities exactly on small graphs and by
Monte Carlo elsewhere, and optimizes seed placement by greedy submodular
maximization against standard centrality baselines.  Hardness-instance
generation maps set-cover instances onto fitness graphs whose optimal
seeds are covers.
"""

__version__ = "0.1.0"

from .errors import MoranOptError
from .estimator import EstimatorConfig, FixationEstimate, estimate_fp, absorption_time_bound, sample_budget
from .exact import ExactResult, exact_fixation, exhaustive_opt, expected_absorption_time, fixation_table, neutral_closed_form
from .graphs import (
    FitnessGraph,
    FitnessSummary,
    build_graph,
    is_mutant_biased,
    is_neutral,
    is_resident_biased,
    make_positional,
    summary,
    with_fitness,
)
from .hardness import (
    ReductionParams,
    SetCoverInstance,
    build_reduction_graph,
    cover_sweep_bound,
    is_cover,
    separation_bounds,
    separation_bounds_log,
    log_lower_bound,
    noncover_escape_bound,
    params_general,
    params_mutant_biased,
    prob_power_threshold,
)
from .io import read_edge_list, read_fitness, write_edge_list, write_fitness
from .process import (
    LoopyKernel,
    StepOutcome,
    TrajectoryStats,
    TwoGraphsView,
    export_two_graphs,
    fitness_of,
    full_mask,
    loopy_kernel,
    loopy_step,
    mask_from_nodes,
    nodes_from_mask,
    potential_phi,
    run_to_absorption,
    step,
)
from .selection import (
    SelectionResult,
    baseline_min_closeness,
    baseline_min_degree,
    baseline_min_pagerank,
    baseline_random,
    closeness,
    exact_evaluator,
    greedy_select,
    mc_evaluator,
    pagerank,
)
from .verify import Verdict, check_loopy_equivalence, check_monotonicity, check_submodularity, check_time_bound
