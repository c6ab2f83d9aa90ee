import itertools
import math

import numpy as np
import pytest

from kuramaxcut.energy import cosine, energy, fourier_tent
from kuramaxcut.graph import Graph, complete_graph, cycle_graph, generate_erdos_renyi, load_edge_list
from kuramaxcut.optimize import default_schedule, solve_pipeline
from kuramaxcut.rounding import cut_weight
from kuramaxcut.verify import (
    MAX_ORACLE_VERTICES,
    VerificationError,
    brute_force_maxcut,
    check_energy_upper_bound,
    check_ratio_vs_oracle,
    check_theorem_bound,
    combinatorial_energy_bound,
    theorem_lower_bound,
    two_point_configuration,
    verify_solution,
)

from .conftest import TWO_PI, random_graph

BALANCED = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])


def itertools_maxcut(graph):
    best = 0.0
    for bits in itertools.product([False, True], repeat=graph.n - 1):
        best = max(best, cut_weight(graph, np.array((True,) + bits)))
    return best


@pytest.mark.parametrize("graph, value", [(cycle_graph(3), 2), (cycle_graph(5), 4), (complete_graph(4), 4),
                                          (cycle_graph(6), 6), (load_edge_list("0 1 2.5"), 2.5)])
def test_brute_force_known_values(graph, value):
    weight, cut = brute_force_maxcut(graph)
    assert weight == value
    assert cut_weight(graph, cut.side) == value and cut.side[0]


@pytest.mark.parametrize("trial", range(25))
def test_brute_force_matches_itertools(trial):
    rng = np.random.default_rng(trial)
    graph = random_graph(rng, n_lo=2, n_hi=12, weighted=bool(trial % 2))
    assert brute_force_maxcut(graph)[0] == pytest.approx(itertools_maxcut(graph), abs=1e-9)


def test_brute_force_gray_code_block():
    # more than 16 vertices exercises the high-vertex walk
    rng = np.random.default_rng(3)
    g = generate_erdos_renyi(19, 0.4, 9)
    g = Graph(g.n, g.u, g.v, rng.uniform(0.5, 2.0, g.num_edges))
    weight, cut = brute_force_maxcut(g)
    assert weight == pytest.approx(cut_weight(g, cut.side))
    assert weight == pytest.approx(itertools_maxcut(g), abs=1e-9)


def test_brute_force_degenerate_graphs():
    assert brute_force_maxcut(Graph.from_edges(1, []))[0] == 0
    assert brute_force_maxcut(Graph.from_edges(6, []))[0] == 0


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_maxcut(cycle_graph(MAX_ORACLE_VERTICES + 1))


def test_two_point_energy_matches_bound():
    tri = cycle_graph(3)
    weight, cut = brute_force_maxcut(tri)
    assert combinatorial_energy_bound(tri, weight) == -2
    assert energy(tri, fourier_tent(5), two_point_configuration(cut)) == pytest.approx(-2)
    assert combinatorial_energy_bound(cycle_graph(4), 4) == -8


def test_energy_bound_checks():
    tri = cycle_graph(3)
    assert check_energy_upper_bound(tri, cosine(), -3.0)
    assert check_energy_upper_bound(tri, cosine(), -2.0)  # boundary counts
    assert not check_energy_upper_bound(tri, cosine(), -1.5)


def test_energy_bound_rejects_bad_oracle():
    c4 = cycle_graph(4)
    _, cut = brute_force_maxcut(c4)
    with pytest.raises(VerificationError):
        check_energy_upper_bound(c4, cosine(), -8.0, oracle=(3.0, cut))


def test_theorem_bound_balanced_triangle():
    rep = check_theorem_bound(cycle_graph(3), cosine(), BALANCED)
    c = rep.details["constant"]
    assert rep.theorem_bound == pytest.approx(c * (1.5 + 0.75))
    assert rep.details["expected_cut"] == pytest.approx(2.0)
    assert rep.theorem_ok


def test_theorem_bound_uses_supplied_constant():
    assert theorem_lower_bound(cycle_graph(3), cosine(), BALANCED, constant=0.5) == pytest.approx(0.5 * 2.25)


def test_theorem_bound_fails_for_inflated_constant():
    # no coupling function admits c = 2
    rep = check_theorem_bound(load_edge_list("0 1"), cosine(), [0.0, math.pi], constant=2.0)
    assert not rep.theorem_ok


@pytest.mark.parametrize("trial", range(20))
def test_theorem_bound_on_random_configurations(trial):
    rng = np.random.default_rng(500 + trial)
    graph = random_graph(rng, weighted=True)
    g = [cosine(), fourier_tent(3), fourier_tent(5)][trial % 3]
    assert check_theorem_bound(graph, g, rng.uniform(0, TWO_PI, graph.n)).theorem_ok


def test_ratio_when_hypothesis_holds():
    c4 = cycle_graph(4)
    rc = check_ratio_vs_oracle(c4, fourier_tent(5), [0.0, math.pi, 0.0, math.pi])
    assert rc.hypothesis_holds and rc.ratio == pytest.approx(1.0)
    assert rc.maxcut_exact == 4


def test_ratio_without_hypothesis_is_reported_only():
    c4 = cycle_graph(4)
    rc = check_ratio_vs_oracle(c4, cosine(), np.zeros(4))
    assert not rc.hypothesis_holds and rc.ratio == 0.0


def test_ratio_empty_graph():
    rc = check_ratio_vs_oracle(Graph.from_edges(3, []), cosine(), [0.0, 1.0, 2.0])
    assert rc.ratio is None and rc.maxcut_exact == 0


@pytest.mark.parametrize("seed", range(6))
def test_solver_output_meets_ratio(seed):
    rng = np.random.default_rng(seed)
    graph = random_graph(rng, n_lo=6, n_hi=12)
    if graph.num_edges == 0:
        pytest.skip("empty draw")
    trace = solve_pipeline(graph, default_schedule(), seed=seed)
    rc = check_ratio_vs_oracle(graph, trace.g, trace.final_configuration, trace.final_energy)
    if rc.hypothesis_holds:
        assert rc.ratio >= rc.constant - 1e-9


def test_verify_solution_report():
    rep = verify_solution(cycle_graph(4), cosine(), [0.0, math.pi, 0.0, math.pi])
    assert rep.maxcut_exact == 4 and rep.energy_bound_ok and rep.theorem_ok
    assert rep.details["ratio_ok"] is True
    d = rep.to_dict()
    assert d["details"]["energy_bound"] == -8


def test_verify_solution_skips_oracle_on_large_graph():
    g = cycle_graph(40)
    rep = verify_solution(g, cosine(), np.zeros(40))
    assert rep.maxcut_exact is None and rep.theorem_ok
