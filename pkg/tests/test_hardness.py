import math
from itertools import combinations

import numpy as np
import pytest

from moranopt.errors import EmptySet, EpsOutOfRange
from moranopt.exact import fixation_table
from moranopt.graphs import is_mutant_biased, is_strongly_connected
from moranopt.hardness import (
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
from moranopt.process import mask_from_nodes


def fig4_instance(k=2):
    """Universe {1..5} covered by {1,4}, {1,2,4}, {3,5}."""
    return SetCoverInstance(
        universe=frozenset({1, 2, 3, 4, 5}),
        sets=(frozenset({1, 4}), frozenset({1, 2, 4}), frozenset({3, 5})),
        k=k,
    )


def test_fig4_graph_shape():
    inst = fig4_instance()
    g = build_reduction_graph(inst, params_general(inst.n_total, 0.4))
    assert g.n == 8
    assert g.n_arcs == 22  # 7 set->element arcs + 15 element->set arcs
    # set nodes first, uniform out-weights
    t0, w0 = g.out_arcs(0)
    assert np.all(w0 == 0.5) and len(t0) == 2
    t3, w3 = g.out_arcs(3)
    assert np.all(w3 == pytest.approx(1 / 3)) and len(t3) == 3


def test_singleton_instance_is_pair():
    inst = SetCoverInstance(universe=frozenset({1}), sets=(frozenset({1}),), k=1)
    g = build_reduction_graph(inst, params_general(inst.n_total, 0.25))
    assert g.n == 2 and g.n_arcs == 2


def test_reduction_graphs_strongly_connected():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n_sets = int(rng.integers(1, 5))
        universe = list(range(int(rng.integers(1, 6))))
        sets = []
        for _ in range(n_sets):
            size = int(rng.integers(1, len(universe) + 1))
            sets.append(frozenset(rng.choice(universe, size=size, replace=False).tolist()))
        covered = frozenset().union(*sets)
        inst = SetCoverInstance(universe=covered, sets=tuple(sets), k=1)
        g = build_reduction_graph(inst, params_general(inst.n_total, 0.3))
        assert is_strongly_connected(g)


def test_instance_validation():
    with pytest.raises(EmptySet):
        SetCoverInstance(universe=frozenset({1}), sets=(), k=0)
    with pytest.raises(EmptySet):
        SetCoverInstance(universe=frozenset({1}), sets=(frozenset(),), k=1)
    with pytest.raises(EmptySet):
        SetCoverInstance(universe=frozenset({1, 9}), sets=(frozenset({1}),), k=1)


def test_is_cover():
    inst = fig4_instance()
    assert is_cover(inst, [0, 1, 2])
    assert not is_cover(inst, [])
    assert is_cover(inst, [1, 2])       # {1,2,4} u {3,5} = universe
    assert not is_cover(inst, [0, 1])   # misses 3 and 5
    assert not is_cover(inst, [0, 2])   # misses 2


def test_params_general_satisfy_both_bounds():
    for n in (4, 6, 8, 12, 20):
        for eps in (0.05, 0.25, 0.4, 0.49):
            p = params_general(n, eps)
            upper, lower = separation_bounds(n, x_log=p.x_log, y=p.y)
            assert upper <= eps
            assert lower > 1.0 - eps
            assert p.regime == "general" and 0 < p.y <= 1 and p.x >= 1


def test_params_general_eps_range():
    with pytest.raises(EpsOutOfRange):
        params_general(8, 0.5)
    with pytest.raises(EpsOutOfRange):
        params_general(8, 0.0)


def test_params_general_asymptotics():
    # y = Theta(1/n^3): y * n^3 approaches the constant ln(1/(1-eps))
    eps = 0.25
    c = math.log(1 / (1 - eps))
    for n in (10, 40, 160):
        p = params_general(n, eps)
        assert 0.5 * c <= p.y * n**3 <= 1.5 * c
        # x tracks n^8 (n-1) / c^2, well inside O(n^10)
        ratio = p.x * c**2 / (n**8 * (n - 1))
        assert 0.9 <= ratio <= 1.1
        assert p.x <= n**10 * 50


def test_params_mutant_biased():
    p = params_mutant_biased(8)
    assert p.y == 1.0
    assert p.describe_x() == "8^23"
    assert p.x_log == pytest.approx(23 * math.log(8))
    inst = fig4_instance()
    g = build_reduction_graph(inst, p)
    assert is_mutant_biased(g)


def test_mutant_biased_bounds_straddle_threshold():
    """With y=1 the gap collapses to the 1 - 1/n^{2n} hairline, evaluable in logs."""
    for n in (4, 8, 16):
        p = params_mutant_biased(n)
        log1m_upper, log_lower = separation_bounds_log(n, p.y, p.x_log)
        log_threshold = math.log1p(-math.exp(-2 * n * math.log(n)))
        assert log_lower > log_threshold          # cover side exceeds the threshold
        assert log1m_upper >= -2 * n * math.log(n)  # so upper <= 1 - 1/n^{2n}


def test_separation_bounds_limits():
    # y -> 0 pushes the non-cover ceiling to 0
    upper, _ = separation_bounds(8, x=1.0, y=1e-15)
    assert upper < 1e-12
    # x -> infinity with y=1 pulls the cover floor to 1
    _, lower = separation_bounds(8, x_log=1e6, y=1.0)
    assert lower == pytest.approx(1.0, abs=1e-12)


def test_separation_bounds_monotone():
    n = 8
    ys = np.logspace(-6, 0, 25)
    uppers = [separation_bounds(n, x=10.0, y=float(y))[0] for y in ys]
    assert all(a < b for a, b in zip(uppers, uppers[1:]))
    xs = np.logspace(0.5, 12, 25)
    lowers = [separation_bounds(n, x=float(x), y=0.5)[1] for x in xs]
    assert all(a < b for a, b in zip(lowers, lowers[1:]))


def test_separation_bounds_input_validation():
    with pytest.raises(ValueError):
        separation_bounds(8, x=2.0, y=0.5, x_log=1.0)
    with pytest.raises(ValueError):
        separation_bounds(8, x=0.5, y=0.5)
    with pytest.raises(ValueError):
        separation_bounds_log(1, 0.5, 1.0)


def test_fig4_separation_and_bracketing():
    """The decision gadget at desk scale: covers beat non-covers, bounds bracket."""
    inst = fig4_instance()
    p = params_general(inst.n_total, 0.4)
    upper, lower = separation_bounds(inst.n_total, x_log=p.x_log, y=p.y)
    assert lower > upper
    g = build_reduction_graph(inst, p)
    table = fixation_table(g)
    cover_fps, noncover_fps = [], []
    for pair in combinations(range(3), 2):
        fp = float(table.fp[mask_from_nodes(pair)])
        (cover_fps if is_cover(inst, pair) else noncover_fps).append(fp)
    assert cover_fps and noncover_fps
    assert min(cover_fps) > max(noncover_fps)
    assert all(fp >= lower for fp in cover_fps)
    assert all(fp <= upper for fp in noncover_fps)


def test_bounds_valid_on_exhaustive_v1_subsets():
    """Every V1 seed set respects its side of the separation bound."""
    instances = [
        fig4_instance(),
        SetCoverInstance(universe=frozenset({1, 2, 3}),
                         sets=(frozenset({1, 2}), frozenset({2, 3}), frozenset({3})), k=2),
    ]
    for inst in instances:
        p = params_general(inst.n_total, 0.4)
        upper, lower = separation_bounds(inst.n_total, x_log=p.x_log, y=p.y)
        g = build_reduction_graph(inst, p)
        table = fixation_table(g)
        n1 = len(inst.sets)
        for size in range(1, n1 + 1):
            for chosen in combinations(range(n1), size):
                fp = float(table.fp[mask_from_nodes(chosen)])
                if is_cover(inst, chosen):
                    assert fp >= lower
                else:
                    assert fp <= upper


def test_helper_bound_inequalities():
    # (1/(1+beta))^n >= p at the certified threshold, across a grid
    for p in (0.01, 0.5, 0.9, 0.999):
        for n in (2, 5, 20, 100):
            beta = prob_power_threshold(p, n)
            assert (1.0 / (1.0 + beta)) ** n >= p - 1e-15
    # 1/(zeta+1) really is below ln(1 + 1/zeta)
    for zeta in np.logspace(-3, 9, 40):
        assert math.log1p(1.0 / zeta) >= log_lower_bound(float(zeta))
    with pytest.raises(ValueError):
        log_lower_bound(0.0)
    with pytest.raises(ValueError):
        prob_power_threshold(1.0, 4)


def test_helper_bounds_assemble_separation():
    # the closed forms are exactly the escape/sweep pieces at exponent n
    n, x, y = 8, 1e4, 0.01
    upper, lower = separation_bounds(n, x=x, y=y)
    assert upper == pytest.approx(1.0 - noncover_escape_bound(n, y, n), rel=1e-12)
    pstar = cover_sweep_bound(n, x, n)
    q = y / n**2
    assert lower == pytest.approx((q * pstar / (1 - (1 - q) * pstar)) ** n, rel=1e-9)


def test_helper_bounds_monotone_directions():
    ys = np.logspace(-5, 0, 20)
    esc = [noncover_escape_bound(8, float(y), 8) for y in ys]
    assert all(a > b for a, b in zip(esc, esc[1:]))  # more element fitness hurts escape
    xs = np.logspace(0, 8, 20)
    swp = [cover_sweep_bound(8, float(x), 8) for x in xs]
    assert all(a < b for a, b in zip(swp, swp[1:]))


def test_reduction_params_x_overflow_guard():
    p = params_mutant_biased(100)  # x = 100^207, far past float range
    assert p.x == math.inf
    with pytest.raises(OverflowError):
        build_reduction_graph(fig4_instance(), ReductionParams(
            y=1.0, x_log=p.x_log, regime="mutant_biased"))
