import math

import numpy as np
import pytest
from hypothesis import settings

from kuramaxcut.graph import Graph, generate_erdos_renyi

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

TWO_PI = 2.0 * math.pi


def random_graph(rng: np.random.Generator, n_lo=2, n_hi=16, weighted=False) -> Graph:
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.2, 0.9))
    g = generate_erdos_renyi(n, p, int(rng.integers(2**31)))
    if weighted and g.num_edges:
        return Graph(g.n, g.u, g.v, rng.uniform(0.1, 3.0, g.num_edges))
    return g


def dense_adjacency(graph: Graph) -> np.ndarray:
    a = np.zeros((graph.n, graph.n))
    for u, v, w in graph.edges:
        a[u, v] = a[v, u] = w
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
