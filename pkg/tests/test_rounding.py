import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kuramaxcut.energy import approximation_constant, cosine, energy, fourier_tent
from kuramaxcut.graph import Graph, cycle_graph, load_edge_list, total_weight
from kuramaxcut.rounding import (
    circle_distance,
    cut_at_angle,
    cut_weight,
    expected_cut,
    monte_carlo_cuts,
    read_sweep_csv,
    separation_probability,
    sweep_all_cuts,
    tent,
)
from kuramaxcut.verify import brute_force_maxcut

from .conftest import TWO_PI, random_graph

BALANCED = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])


@pytest.mark.parametrize(
    "a, b, d",
    [(0.0, math.pi, math.pi), (0.1, TWO_PI - 0.1, 0.2), (1.3, 1.3, 0.0), (-1.0, 1.0, 2.0), (0.0, 5 * math.pi, math.pi)],
)
def test_circle_distance(a, b, d):
    assert circle_distance(a, b) == pytest.approx(d, abs=1e-12)


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_circle_distance_range_and_symmetry(a, b):
    d = circle_distance(a, b)
    assert 0 <= d <= math.pi
    assert d == pytest.approx(circle_distance(b, a), abs=1e-12)


def test_tent_kernel():
    assert tent(0.0) == 1.0
    assert tent(math.pi) == pytest.approx(-1.0)
    assert tent(math.pi / 2) == pytest.approx(0.0)


def test_separation_probability_endpoints():
    assert separation_probability(0.0, math.pi) == pytest.approx(1.0)
    assert separation_probability(2.0, 2.0) == 0.0
    assert separation_probability(0.0, 2 * math.pi / 3) == pytest.approx(2 / 3)


def test_separation_probability_monte_carlo():
    rng = np.random.default_rng(5)
    phi = rng.uniform(0, math.pi, 1_000_000)
    a, b = 0.0, 2 * math.pi / 3
    side_a = np.mod(a - phi, TWO_PI) < math.pi
    side_b = np.mod(b - phi, TWO_PI) < math.pi
    est = np.mean(side_a != side_b)
    p = 2 / 3
    assert abs(est - p) <= 3 * math.sqrt(p * (1 - p) / len(phi))


def test_expected_cut_examples():
    assert expected_cut(cycle_graph(3), BALANCED) == pytest.approx(2.0)
    assert expected_cut(load_edge_list("0 1"), [0.0, math.pi]) == pytest.approx(1.0)
    g = random_graph(np.random.default_rng(1))
    assert expected_cut(g, np.full(g.n, 0.4)) == 0.0


def test_expected_cut_length_check():
    with pytest.raises(ValueError):
        expected_cut(cycle_graph(3), [0.0])


def test_cut_at_angle_examples():
    edge = load_edge_list("0 1")
    assert cut_at_angle(edge, [0.0, math.pi], math.pi / 2).weight == 1
    c = cut_at_angle(edge, [0.0, math.pi], 0.01)
    assert c.side.tolist() == [False, True] and c.weight == 1
    assert cut_at_angle(edge, [0.1, 0.2], 1.0).weight == 0


def test_cut_at_angle_ties_go_to_side_a():
    c = cut_at_angle(load_edge_list("0 1"), [0.5, 0.5 + math.pi], 0.5)
    assert c.side.tolist() == [True, False]


def test_sweep_antipodal_edge():
    sweep = sweep_all_cuts(load_edge_list("0 1"), [0.0, math.pi])
    assert len(sweep.breakpoints) == 1
    assert sweep.best.weight == 1 and sweep.expected == pytest.approx(1.0)


def test_sweep_balanced_triangle():
    sweep = sweep_all_cuts(cycle_graph(3), BALANCED)
    assert len(sweep.breakpoints) == 3
    assert sweep.cut_per_interval.tolist() == [2.0, 2.0, 2.0]
    assert sweep.expected == pytest.approx(2.0, abs=1e-12)
    assert sweep.best.weight == 2


def test_sweep_merges_breakpoint_near_pi():
    sweep = sweep_all_cuts(load_edge_list("0 1"), [0.0, math.pi - 1e-14])
    assert len(sweep.breakpoints) == 1


@pytest.mark.parametrize("method", ["incremental", "direct"])
@pytest.mark.parametrize("trial", range(30))
def test_sweep_expected_matches_closed_form(trial, method):
    rng = np.random.default_rng(trial)
    g = random_graph(rng, n_lo=2, n_hi=40, weighted=bool(trial % 2))
    theta = rng.uniform(0, TWO_PI, g.n)
    sweep = sweep_all_cuts(g, theta, method=method)
    assert sweep.expected == pytest.approx(expected_cut(g, theta), abs=1e-9)
    assert sweep.best.weight == pytest.approx(float(sweep.cut_per_interval.max()))
    assert sweep.best.weight == pytest.approx(cut_weight(g, sweep.best.side))
    assert len(sweep.breakpoints) <= g.n
    assert sweep.best.weight >= sweep.expected - 1e-9


@pytest.mark.parametrize("trial", range(20))
def test_incremental_sweep_equals_direct(trial):
    rng = np.random.default_rng(50 + trial)
    g = random_graph(rng, n_lo=2, n_hi=60, weighted=True)
    theta = rng.uniform(0, TWO_PI, g.n)
    # force coincident and antipodal vertices
    if g.n > 3:
        theta[1] = theta[0]
        theta[2] = (theta[0] + math.pi) % TWO_PI
    a = sweep_all_cuts(g, theta, "incremental")
    b = sweep_all_cuts(g, theta, "direct")
    np.testing.assert_array_equal(a.breakpoints, b.breakpoints)
    np.testing.assert_allclose(a.cut_per_interval, b.cut_per_interval, atol=1e-9)


def test_sweep_partition_constant_inside_intervals():
    rng = np.random.default_rng(9)
    g = random_graph(rng, n_lo=8, n_hi=12)
    theta = rng.uniform(0, TWO_PI, g.n)
    sweep = sweep_all_cuts(g, theta)
    for lo, hi, c in zip(*sweep.interval_bounds, sweep.cut_per_interval):
        for frac in (0.1, 0.5, 0.9):
            phi = (lo + frac * (hi - lo)) % math.pi
            assert cut_at_angle(g, theta, phi).weight == pytest.approx(c)


@pytest.mark.parametrize("trial", range(15))
def test_best_sweep_cut_below_oracle(trial):
    rng = np.random.default_rng(300 + trial)
    g = random_graph(rng, n_lo=3, n_hi=12)
    sweep = sweep_all_cuts(g, rng.uniform(0, TWO_PI, g.n))
    assert sweep.best.weight <= brute_force_maxcut(g)[0] + 1e-12


@given(st.integers(0, 10**6), st.floats(-10, 10))
def test_rotation_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    g = random_graph(rng)
    theta = rng.uniform(0, TWO_PI, g.n)
    rotated = np.mod(theta + shift, TWO_PI)
    assert expected_cut(g, rotated) == pytest.approx(expected_cut(g, theta), abs=1e-9)
    assert sweep_all_cuts(g, rotated).best.weight == pytest.approx(sweep_all_cuts(g, theta).best.weight)


@given(st.integers(0, 10**6))
def test_pointwise_theorem_chain(seed):
    rng = np.random.default_rng(seed)
    graph = random_graph(rng, weighted=True)
    theta = rng.uniform(0, TWO_PI, graph.n)
    for gfun in (cosine(), fourier_tent(2), fourier_tent(5)):
        c = approximation_constant(gfun).value
        rhs = c * (total_weight(graph) / 2 - energy(graph, gfun, theta) / 4)
        assert expected_cut(graph, theta) >= rhs - 1e-9


def test_monte_carlo_agrees_with_sweep():
    rng = np.random.default_rng(4)
    g = random_graph(rng, n_lo=10, n_hi=14)
    theta = rng.uniform(0, TWO_PI, g.n)
    samples = monte_carlo_cuts(g, theta, 100_000, seed=1)
    se = samples.std(ddof=1) / math.sqrt(len(samples))
    assert abs(samples.mean() - sweep_all_cuts(g, theta).expected) <= 4 * se + 1e-12


def test_sweep_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    g = random_graph(rng, n_lo=6, n_hi=9)
    sweep = sweep_all_cuts(g, rng.uniform(0, TWO_PI, g.n))
    path = tmp_path / "sweep.csv"
    path.write_text(sweep.to_csv())
    rows = read_sweep_csv(path)
    lo, hi = sweep.interval_bounds
    assert [r[0] for r in rows] == lo.tolist()
    assert [r[1] for r in rows] == hi.tolist()
    assert [r[2] for r in rows] == sweep.cut_per_interval.tolist()
    assert sum((r[1] - r[0]) for r in rows) == pytest.approx(math.pi)


def test_isolated_vertices_are_harmless():
    g = Graph.from_edges(5, [(0, 1)])
    sweep = sweep_all_cuts(g, [0.0, math.pi, 0.3, 0.3, 2.0])
    assert sweep.best.weight == 1 and sweep.expected == pytest.approx(1.0)
