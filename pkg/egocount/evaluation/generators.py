"""Synthetic population graphs, so that simulations need no downloaded data."""

from __future__ import annotations

import networkx as nx
import numpy as np

from egocount.graph import Graph, largest_component


def _with_states(nxg: nx.Graph, states: int, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    values = rng.integers(1, states + 1, size=nxg.number_of_nodes())
    nx.set_node_attributes(
        nxg, {node: int(s) for node, s in zip(nxg.nodes, values)}, "state"
    )
    return largest_component(Graph.from_networkx(nxg))


def erdos_renyi(
    vertex_count: int, p: float, seed: int = 0, states: int = 1, directed: bool = False
) -> Graph:
    """G(N, p), reduced to its largest component. With `states` > 1 every vertex
    gets a uniformly random state in 1..states."""
    nxg = nx.gnp_random_graph(vertex_count, p, seed=seed, directed=directed)
    return _with_states(nxg, states, seed)


def heterogeneous(vertex_count: int, m: int, seed: int = 0, states: int = 1) -> Graph:
    """Preferential attachment graph with heavy-tailed degrees."""
    nxg = nx.barabasi_albert_graph(vertex_count, m, seed=seed)
    return _with_states(nxg, states, seed)
