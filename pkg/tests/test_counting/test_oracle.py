import networkx as nx
import pytest

from egocount.catalog import get_pattern, triad_patterns
from egocount.counting import exact_count, search_cost
from egocount.errors import BudgetExceeded, ModeMismatchError
from egocount.graph import Graph
from egocount.pattern import PatternSpec


def count(g, name, **kwargs):
    return exact_count(g, PatternSpec.build(get_pattern(name), **kwargs))


class TestExactCount:

    @pytest.mark.parametrize(
        "name, expected",
        [
            ("triangle", 4),
            ("edge", 6),
            ("path3", 0),
            ("path3-noninduced", 12),
            ("star-3", 4),
            ("clique-3", 0),
            ("clique-4", 1),
            ("complete-4", 1),
        ],
    )
    def test_complete_graph(self, k4: Graph, name, expected):
        assert count(k4, name) == expected

    def test_triangle_with_pendant(self, triangle_pendant: Graph):
        assert count(triangle_pendant, "triangle") == 1
        assert count(triangle_pendant, "path3") == 2
        assert count(triangle_pendant, "clique-3") == 1
        assert count(triangle_pendant, "clique-2") == 1

    def test_small_cases(self, k3: Graph, star3: Graph):
        assert count(k3, "path3-noninduced") == 3
        assert count(k3, "path3") == 0
        assert count(star3, "clique-2") == 3
        path = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert count(path, "path3-noninduced") == 1

    def test_triadic_census(self, small_digraph: Graph):
        census = nx.triadic_census(small_digraph.to_networkx())
        for pattern in triad_patterns():
            spec = PatternSpec.build(pattern)
            assert exact_count(small_digraph, spec) == census[pattern.name.removeprefix("d3-")]

    def test_triangles_match_networkx(self, small_graph: Graph):
        triangles = sum(nx.triangles(small_graph.to_networkx()).values()) // 3
        assert count(small_graph, "triangle") == triangles

    def test_composition(self):
        # triangle whose vertices are in states 1, 1, 2
        g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], states=[1, 1, 2])
        triangle = get_pattern("triangle")
        assert exact_count(g, PatternSpec.build(triangle, composition=[[2, 1]])) == 1
        assert exact_count(g, PatternSpec.build(triangle, composition=[[1, 2]])) == 0
        assert exact_count(g, PatternSpec.build(triangle)) == 1

    def test_budget(self, k4: Graph):
        spec = PatternSpec.build(get_pattern("triangle"))
        assert search_cost(k4, spec) == 4 * 3**2
        with pytest.raises(BudgetExceeded):
            exact_count(k4, spec, budget=35)
        assert exact_count(k4, spec, budget=36) == 4

    def test_mode_mismatch(self, k4: Graph):
        with pytest.raises(ModeMismatchError):
            count(k4, "feedforward")
