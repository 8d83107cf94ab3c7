"""Population graph with integer vertex states, and egonet extraction.

Vertex ids are compacted to 0..N-1 in order of first appearance in the edge list.
The original ids are kept in `Graph.original_ids` so that labeled samples can
identify alters across egonets and across runs.
"""

from __future__ import annotations

import gzip
import logging
import typing
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

import networkx as nx

from egocount.errors import (
    GraphParseError,
    InvalidStateError,
    ModeMismatchError,
    UnknownVertexError,
)

if typing.TYPE_CHECKING:
    from typing import Iterable, Iterator, TextIO

    Edge = tuple[int, int]

logger = logging.getLogger(__name__)


class NeighborhoodMode(str, Enum):
    """Which vertices count as alters of an ego."""

    UndirectedFull = "undirected_full"
    """Undirected graph; all adjacent vertices."""

    DirectedUnion = "directed_union"
    """Directed graph; every vertex sharing a non-null dyad with the ego."""

    DirectedOut = "directed_out"
    """Directed graph; vertices the ego points to."""

    DirectedIn = "directed_in"
    """Directed graph; vertices pointing to the ego."""

    @property
    def directed(self) -> bool:
        return self is not NeighborhoodMode.UndirectedFull

    @classmethod
    def parse(cls, value: str | NeighborhoodMode) -> NeighborhoodMode:
        if isinstance(value, NeighborhoodMode):
            return value
        aliases = {
            "full": cls.UndirectedFull,
            "undirected": cls.UndirectedFull,
            "union": cls.DirectedUnion,
            "out": cls.DirectedOut,
            "in": cls.DirectedIn,
        }
        key = value.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class Graph:
    directed: bool
    out_adjacency: tuple[tuple[int, ...], ...]
    """Sorted out-neighbors per vertex (all neighbors when undirected)."""

    in_adjacency: tuple[tuple[int, ...], ...]
    """Sorted in-neighbors per vertex. Same object as `out_adjacency` when undirected."""

    states: tuple[int, ...]
    """Attribute state per vertex, in 1..state_count."""

    original_ids: tuple[int, ...]
    """Vertex id in the source file for each compact id."""

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[Edge],
        directed: bool = False,
        states: Iterable[int] | None = None,
        original_ids: Iterable[int] | None = None,
    ) -> Graph:
        """Builds a graph from compact-id edges. Self-loops and parallel edges are
        dropped."""
        out_sets: list[set[int]] = [set() for _ in range(vertex_count)]
        in_sets: list[set[int]] = (
            [set() for _ in range(vertex_count)] if directed else out_sets
        )
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise UnknownVertexError(f"Edge ({u}, {v}) outside 0..{vertex_count - 1}")
            if u == v:
                continue
            out_sets[u].add(v)
            # in_sets aliases out_sets when undirected
            in_sets[v].add(u)

        out_adjacency = tuple(tuple(sorted(s)) for s in out_sets)
        in_adjacency = (
            tuple(tuple(sorted(s)) for s in in_sets) if directed else out_adjacency
        )
        states_t = tuple(states) if states is not None else (1,) * vertex_count
        ids = (
            tuple(original_ids) if original_ids is not None else tuple(range(vertex_count))
        )
        if len(states_t) != vertex_count or len(ids) != vertex_count:
            raise ValueError("states and original_ids must have one entry per vertex")
        for v, state in enumerate(states_t):
            if state < 1:
                raise InvalidStateError(f"Vertex {ids[v]} has state {state} (must be >= 1)")
        return cls(directed, out_adjacency, in_adjacency, states_t, ids)

    @classmethod
    def from_networkx(cls, graph: nx.Graph, state_attr: str = "state") -> Graph:
        """Converts a networkx graph. Node order of `graph` becomes the compact
        order; integer node labels are kept as original ids."""
        nodes = list(graph.nodes)
        index = {node: i for i, node in enumerate(nodes)}
        original_ids = [
            node if isinstance(node, int) else i for i, node in enumerate(nodes)
        ]
        states = [int(graph.nodes[node].get(state_attr, 1)) for node in nodes]
        edges = ((index[u], index[v]) for u, v in graph.edges)
        return cls.from_edges(
            len(nodes),
            edges,
            directed=graph.is_directed(),
            states=states,
            original_ids=original_ids,
        )

    def to_networkx(self) -> nx.Graph:
        graph: nx.Graph = nx.DiGraph() if self.directed else nx.Graph()
        graph.add_nodes_from(
            (v, {"state": state}) for v, state in enumerate(self.states)
        )
        graph.add_edges_from(self.edges())
        return graph

    @property
    def vertex_count(self) -> int:
        return len(self.states)

    @cached_property
    def state_count(self) -> int:
        return max(self.states, default=1)

    @cached_property
    def edge_count(self) -> int:
        total = sum(len(adj) for adj in self.out_adjacency)
        return total if self.directed else total // 2

    @cached_property
    def out_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(adj) for adj in self.out_adjacency)

    @cached_property
    def in_sets(self) -> tuple[frozenset[int], ...]:
        if not self.directed:
            return self.out_sets
        return tuple(frozenset(adj) for adj in self.in_adjacency)

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        """Neighbors in the undirected view."""
        if not self.directed:
            return self.out_sets
        return tuple(o | i for o, i in zip(self.out_sets, self.in_sets))

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbors in the undirected view."""
        if not self.directed:
            return self.out_adjacency
        return tuple(tuple(sorted(s)) for s in self.neighbor_sets)

    @cached_property
    def connected(self) -> bool:
        """Connectivity of the undirected view."""
        if self.vertex_count == 0:
            return False
        nxg = self.to_networkx()
        return nx.is_weakly_connected(nxg) if self.directed else nx.is_connected(nxg)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {original: v for v, original in enumerate(self.original_ids)}

    def index_of(self, original_id: int) -> int:
        try:
            return self._index[original_id]
        except KeyError:
            raise UnknownVertexError(f"Vertex {original_id} is not in the graph") from None

    def degree(self, v: int) -> int:
        return len(self.neighbor_sets[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_sets[u]

    def edges(self) -> Iterator[Edge]:
        """All edges; arcs u->v when directed, pairs u < v when undirected."""
        for u, adj in enumerate(self.out_adjacency):
            for v in adj:
                if self.directed or u < v:
                    yield u, v

    def induced_subgraph(self, vertices: Iterable[int]) -> Graph:
        """Subgraph induced by `vertices`, recompacted in ascending compact id order."""
        kept = sorted(set(vertices))
        local = {v: i for i, v in enumerate(kept)}
        edges = (
            (local[u], local[v])
            for u, v in self.edges()
            if u in local and v in local
        )
        return Graph.from_edges(
            len(kept),
            edges,
            directed=self.directed,
            states=(self.states[v] for v in kept),
            original_ids=(self.original_ids[v] for v in kept),
        )


@dataclass(frozen=True)
class Egonet:
    """One sampled unit: the ego, its alters and every edge of G among them.
    The ego is always local vertex 0; alters follow in ascending order."""

    ego: int
    members: tuple[int, ...]
    edges: tuple[Edge, ...]
    """Edges in local indices (arcs when directed, pairs i < j otherwise)."""

    states: tuple[int, ...]
    mode: NeighborhoodMode
    labels: tuple[int, ...] | None = field(default=None)
    """Identities of the members that are stable across egonets (original ids), or
    None for an unlabeled (anonymized) egonet."""

    @property
    def directed(self) -> bool:
        return self.mode.directed

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    @cached_property
    def out_sets(self) -> tuple[frozenset[int], ...]:
        sets: list[set[int]] = [set() for _ in range(self.size)]
        for i, j in self.edges:
            sets[i].add(j)
            if not self.directed:
                sets[j].add(i)
        return tuple(frozenset(s) for s in sets)

    @cached_property
    def in_sets(self) -> tuple[frozenset[int], ...]:
        if not self.directed:
            return self.out_sets
        sets: list[set[int]] = [set() for _ in range(self.size)]
        for i, j in self.edges:
            sets[j].add(i)
        return tuple(frozenset(s) for s in sets)

    def anonymized(self) -> Egonet:
        return Egonet(
            ego=self.ego,
            members=tuple(range(self.size)),
            edges=self.edges,
            states=self.states,
            mode=self.mode,
            labels=None,
        )


def neighborhood(g: Graph, ego: int, mode: NeighborhoodMode) -> frozenset[int]:
    """N^e(ego) under `mode`."""
    match mode:
        case NeighborhoodMode.UndirectedFull:
            return g.out_sets[ego]
        case NeighborhoodMode.DirectedUnion:
            return g.out_sets[ego] | g.in_sets[ego]
        case NeighborhoodMode.DirectedOut:
            return g.out_sets[ego]
        case NeighborhoodMode.DirectedIn:
            return g.in_sets[ego]
    raise ValueError(f"Unknown mode {mode}")


def check_mode(directed: bool, mode: NeighborhoodMode) -> None:
    if mode.directed != directed:
        kind = "directed" if directed else "undirected"
        raise ModeMismatchError(f"Mode {mode.value} cannot be used with a {kind} graph")


def extract_egonet(g: Graph, ego: int, mode: NeighborhoodMode) -> Egonet:
    check_mode(g.directed, mode)
    if not 0 <= ego < g.vertex_count:
        raise UnknownVertexError(f"Ego {ego} outside 0..{g.vertex_count - 1}")

    members = (ego, *sorted(neighborhood(g, ego, mode)))
    local = {v: i for i, v in enumerate(members)}
    edges = []
    for i, u in enumerate(members):
        for v in g.out_adjacency[u]:
            j = local.get(v)
            if j is not None and (g.directed or i < j):
                edges.append((i, j))
    return Egonet(
        ego=ego,
        members=members,
        edges=tuple(sorted(edges)),
        states=tuple(g.states[v] for v in members),
        mode=mode,
        labels=tuple(g.original_ids[v] for v in members),
    )


def largest_component(g: Graph) -> Graph:
    """The largest connected (weakly, when directed) component. Ties go to the
    component holding the smallest original vertex id."""
    if g.vertex_count == 0:
        return g
    nxg = g.to_networkx()
    components = (
        nx.weakly_connected_components(nxg) if g.directed else nx.connected_components(nxg)
    )
    best = max(
        components,
        key=lambda c: (len(c), -min(g.original_ids[v] for v in c)),
    )
    if len(best) == g.vertex_count:
        return g
    logger.info("Keeping largest component: %d of %d vertices", len(best), g.vertex_count)
    return g.induced_subgraph(best)


def _split(line: str) -> list[str] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    return stripped.split()


def _parse_pair(line: str, line_number: int, what: str) -> tuple[int, int] | None:
    fields = _split(line)
    if fields is None:
        return None
    if len(fields) != 2:
        raise GraphParseError(f"expected '{what}', got {line.strip()!r}", line_number)
    try:
        return int(fields[0]), int(fields[1])
    except ValueError:
        raise GraphParseError(
            f"expected two integers, got {line.strip()!r}", line_number
        ) from None


def load_graph(
    edge_list: Iterable[str],
    attribute_table: Iterable[str] | None = None,
    directed: bool = False,
) -> Graph:
    """Parses an edge list ("u v" per line, '#' comments) and an optional attribute
    table ("v state" per line).

    A vertex that only occurs in a self-loop line is kept as an isolated vertex.
    Vertices missing from the attribute table get state 1.
    """
    index: dict[int, int] = {}
    edges: list[Edge] = []
    for line_number, line in enumerate(edge_list, start=1):
        pair = _parse_pair(line, line_number, "u v")
        if pair is None:
            continue
        u = index.setdefault(pair[0], len(index))
        v = index.setdefault(pair[1], len(index))
        if u != v:
            edges.append((u, v))

    states = [1] * len(index)
    if attribute_table is not None:
        for line_number, line in enumerate(attribute_table, start=1):
            pair = _parse_pair(line, line_number, "vertex state")
            if pair is None:
                continue
            vertex, state = pair
            if vertex not in index:
                raise UnknownVertexError(
                    f"Attribute table line {line_number}: vertex {vertex} is not in the edge list"
                )
            if state < 1:
                raise InvalidStateError(
                    f"Attribute table line {line_number}: state {state} (must be >= 1)"
                )
            states[index[vertex]] = state

    graph = Graph.from_edges(
        len(index), edges, directed=directed, states=states, original_ids=index.keys()
    )
    logger.debug(
        "Loaded graph: %d vertices, %d edges, %d states",
        graph.vertex_count,
        graph.edge_count,
        graph.state_count,
    )
    return graph


def open_text(path: str | Path, mode: str = "r") -> TextIO:
    """Opens plain or gzip-compressed (".gz") text."""
    path = Path(path)
    if path.suffix == ".gz":
        return typing.cast("TextIO", gzip.open(path, mode + "t", encoding="utf-8"))
    return typing.cast("TextIO", open(path, mode, encoding="utf-8"))


def load_graph_file(
    edge_path: str | Path,
    attribute_path: str | Path | None = None,
    directed: bool = False,
) -> Graph:
    with open_text(edge_path) as edge_file:
        if attribute_path is None:
            return load_graph(edge_file, directed=directed)
        with open_text(attribute_path) as attribute_file:
            return load_graph(edge_file, attribute_file, directed=directed)


def _introduction_edges(g: Graph) -> list[Edge]:
    """Lines that make every vertex first appear in compact order. Each vertex k is
    introduced by an edge to an earlier vertex, by the edge k->k+1, or by a
    self-loop line (dropped on load, but it registers the vertex)."""
    lines: list[Edge] = []
    k = 0
    while k < g.vertex_count:
        earlier = [j for j in g.neighbor_sets[k] if j < k]
        if earlier:
            j = min(earlier)
            lines.append((j, k) if g.has_edge(j, k) else (k, j))
            k += 1
        elif k + 1 < g.vertex_count and g.has_edge(k, k + 1):
            lines.append((k, k + 1))
            k += 2
        else:
            lines.append((k, k))
            k += 1
    return lines


def write_edge_list(g: Graph, stream: TextIO) -> None:
    """Writes edges with original ids so that `load_graph` rebuilds the same graph."""
    intro = _introduction_edges(g)
    written = set(intro)
    ids = g.original_ids
    for u, v in intro:
        stream.write(f"{ids[u]} {ids[v]}\n")
    for u, v in g.edges():
        if (u, v) not in written:
            stream.write(f"{ids[u]} {ids[v]}\n")


def write_attributes(g: Graph, stream: TextIO) -> None:
    for original, state in zip(g.original_ids, g.states):
        stream.write(f"{original} {state}\n")
