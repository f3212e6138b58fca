import numpy as np
import pytest

from ultinet.analysis import (
    box_stats, degree_summary, detect_convergence, measure_performance, population_average,
    suffix_std,
)
from ultinet.network import InteractionGraph, generate_ba
from ultinet.verify import brute_force_convergence, check_convergence_oracle


def test_suffix_std_matches_direct():
    rng = np.random.default_rng(0)
    a = rng.normal(5, 1, 300)
    want = np.array([a[t:].std() for t in range(a.size)])
    assert suffix_std(a) == pytest.approx(want, abs=1e-10)


def test_constant_trace_converges_at_start():
    c = detect_convergence(np.full(500, 4.5), 50)
    assert c.t == 1 and c.games_per_agent == 1 / 50
    assert c.learned_strategy == 4.5 and c.converged


def test_step_trace():
    trace = np.r_[np.zeros(100), np.ones(400)]
    c = detect_convergence(trace, 10)
    assert c.t == 101 and c.learned_strategy == 1.0 and c.converged
    assert c.t == brute_force_convergence(trace)


def test_unsettled_trace_is_not_converged():
    trace = np.sin(np.arange(1000.0))
    c = detect_convergence(trace, 50)
    assert c.t > 950 and not c.converged


def test_detect_convergence_against_oracle():
    result = check_convergence_oracle(seed=7)
    assert result.passed, result.detail


def test_homogeneous_population_performance_is_one():
    g = generate_ba(80, np.random.default_rng(1))
    perf = measure_performance(np.full(80, 3.7), g)
    assert perf.performance == 1.0 and perf.played_fraction == 1.0


def test_performance_counts_directed_games():
    g = InteractionGraph(2)
    g.add_edge(0, 1)
    # 4 proposing to 5 fails, 5 proposing to 4 succeeds
    assert measure_performance([4.0, 5.0], g).performance == 0.5
    # within the 1% slack both directions succeed
    assert measure_performance([4.96, 5.0], g).performance == 1.0


def test_performance_with_gate():
    g = InteractionGraph(3)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    perf = measure_performance([1.0, 1.0, 2.0], g, gate=lambda p, r: p != 2)
    assert perf.played_fraction == 0.75
    assert perf.performance == 0.5
    assert perf.played_performance == pytest.approx(2 / 3)


def test_population_average():
    assert population_average([1.0, 2.0, 6.0]) == 3.0
    with pytest.raises(ValueError):
        population_average([])


def test_box_stats_order():
    rng = np.random.default_rng(2)
    for _ in range(50):
        b = box_stats(rng.normal(0, 3, rng.integers(1, 40)))
        assert b.min <= b.q1 <= b.median <= b.q3 <= b.max
        assert b.min <= b.mean <= b.max
    b = box_stats([1, 2, 3, 4])
    assert (b.q1, b.median, b.q3) == (1.75, 2.5, 3.25)
    with pytest.raises(ValueError):
        box_stats([])


def test_degree_summary():
    g = InteractionGraph(3)
    g.add_edge(0, 1)
    g.add_edge(0, 2)
    d = degree_summary(g)
    assert d.max == 2 and d.mean == pytest.approx(4 / 3)
