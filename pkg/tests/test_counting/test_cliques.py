import networkx as nx
import pytest

from egocount.counting import enumerate_maximal_cliques
from egocount.errors import ModeMismatchError
from egocount.graph import Graph, NeighborhoodMode, extract_egonet

FULL = NeighborhoodMode.UndirectedFull


class TestMaximalCliques:

    def test_complete_graph(self, k4: Graph):
        e = extract_egonet(k4, 0, FULL)
        assert enumerate_maximal_cliques(e) == [frozenset({0, 1, 2, 3})]

    def test_triangle_with_pendant(self, triangle_pendant: Graph):
        # ego c: local 0 = c, 1 = a, 2 = b, 3 = d
        e = extract_egonet(triangle_pendant, 2, FULL)
        assert enumerate_maximal_cliques(e) == [frozenset({0, 1, 2}), frozenset({0, 3})]

    def test_star_center(self, star3: Graph):
        e = extract_egonet(star3, 0, FULL)
        assert enumerate_maximal_cliques(e) == [
            frozenset({0, 1}),
            frozenset({0, 2}),
            frozenset({0, 3}),
        ]

    def test_isolated_ego(self):
        g = Graph.from_edges(2, [])
        e = extract_egonet(g, 0, FULL)
        assert enumerate_maximal_cliques(e) == [frozenset({0})]

    def test_matches_networkx(self, small_graph: Graph):
        expected = [frozenset(c) for c in nx.find_cliques(small_graph.to_networkx())]
        for v in range(small_graph.vertex_count):
            e = extract_egonet(small_graph, v, FULL)
            found = {
                frozenset(e.members[i] for i in clique)
                for clique in enumerate_maximal_cliques(e)
            }
            assert found == {c for c in expected if v in c}

    def test_directed(self):
        g = Graph.from_edges(2, [(0, 1)], directed=True)
        e = extract_egonet(g, 0, NeighborhoodMode.DirectedUnion)
        with pytest.raises(ModeMismatchError):
            enumerate_maximal_cliques(e)
