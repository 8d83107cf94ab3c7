import itertools
from pathlib import Path

import pytest

from egocount.evaluation.generators import erdos_renyi
from egocount.graph import Graph

test_folder = Path(__file__).parent
fixtures_folder = test_folder / "fixtures"


def make_graph(vertex_count, edges, directed=False, states=None) -> Graph:
    return Graph.from_edges(vertex_count, edges, directed=directed, states=states)


@pytest.fixture
def k4() -> Graph:
    return make_graph(4, itertools.combinations(range(4), 2))


@pytest.fixture
def k3() -> Graph:
    return make_graph(3, itertools.combinations(range(3), 2))


@pytest.fixture
def triangle_pendant() -> Graph:
    # a-b, b-c, c-a, c-d with a, b, c, d = 0, 1, 2, 3
    return make_graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)])


@pytest.fixture
def star3() -> Graph:
    return make_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture(params=[0, 1, 2])
def small_graph(request) -> Graph:
    return erdos_renyi(14, 0.35, seed=request.param)


@pytest.fixture(params=[0, 1])
def small_digraph(request) -> Graph:
    return erdos_renyi(10, 0.3, seed=request.param, directed=True)


@pytest.fixture
def two_state_graph() -> Graph:
    return erdos_renyi(14, 0.4, seed=3, states=2)
