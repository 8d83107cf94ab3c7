"""Exact census counts of H in the whole graph, for small graphs."""

from __future__ import annotations

import logging
import typing
from collections import Counter

import networkx as nx
from networkx.algorithms import isomorphism

from egocount.errors import BudgetExceeded
from egocount.graph import check_mode
from egocount.pattern import CountMode

if typing.TYPE_CHECKING:
    from egocount.graph import Graph
    from egocount.pattern import PatternSpec

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


def search_cost(g: Graph, spec: PatternSpec) -> int:
    """Rough upper bound on the work of a full search: N * max_degree^(h-1)."""
    max_degree = max((g.degree(v) for v in range(g.vertex_count)), default=0)
    return g.vertex_count * max(max_degree, 1) ** (spec.pattern.order - 1)


def _pattern_graph(spec: PatternSpec) -> nx.Graph:
    pattern = spec.pattern
    graph: nx.Graph = nx.DiGraph() if pattern.directed else nx.Graph()
    graph.add_nodes_from(range(pattern.order))
    graph.add_edges_from(pattern.edges)
    return graph


def exact_count(g: Graph, spec: PatternSpec, budget: int = DEFAULT_BUDGET) -> int:
    """C(H, U): copies of H in G whose orbit compositions match U, counted once each
    regardless of their automorphisms."""
    check_mode(g.directed, spec.mode)
    cost = search_cost(g, spec)
    if cost > budget:
        raise BudgetExceeded(
            f"Exact count of {spec.pattern.label} needs about {cost:.3g} steps, "
            f"budget is {budget:.3g}"
        )

    wanted = spec.composition.row_states
    states = g.states if spec.composition.annotated else (1,) * g.vertex_count
    orbits = spec.orbits
    members = [orbits.members(i) for i in range(orbits.orbit_count)]
    graph = g.to_networkx()

    if spec.pattern.count_mode is CountMode.MaximalClique:
        return sum(
            1
            for clique in nx.find_cliques(graph)
            if len(clique) == spec.pattern.order
            and Counter(states[v] for v in clique) == wanted[0]
        )

    matcher_type = isomorphism.DiGraphMatcher if g.directed else isomorphism.GraphMatcher
    matcher = matcher_type(graph, _pattern_graph(spec))
    if spec.pattern.count_mode.induced:
        mappings = matcher.subgraph_isomorphisms_iter()
    else:
        mappings = matcher.subgraph_monomorphisms_iter()

    copies: set[tuple[frozenset[int], frozenset[tuple[int, int]]]] = set()
    for mapping in mappings:
        image = {h: v for v, h in mapping.items()}
        if any(
            Counter(states[image[h]] for h in members[i]) != wanted[i]
            for i in range(orbits.orbit_count)
        ):
            continue
        if spec.pattern.count_mode.induced:
            edges: frozenset[tuple[int, int]] = frozenset()
        elif g.directed:
            edges = frozenset((image[u], image[v]) for u, v in spec.pattern.edges)
        else:
            edges = frozenset(
                (min(image[u], image[v]), max(image[u], image[v]))
                for u, v in spec.pattern.edges
            )
        copies.add((frozenset(mapping), edges))

    logger.debug("Exact count of %s: %d", spec.identity, len(copies))
    return len(copies)
