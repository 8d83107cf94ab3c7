"""Built-in patterns: small cliques, stars, the connected 4-node graphs, the 5-node
graphs with a universal vertex and the connected 3-node directed graphs."""

from __future__ import annotations

import itertools
import typing
from functools import cache

from egocount.graph import NeighborhoodMode
from egocount.pattern import (
    CountMode,
    Pattern,
    automorphism_orbits,
    observable_orbits,
)

if typing.TYPE_CHECKING:
    from typing import Iterable

    Edge = tuple[int, int]

G4_EDGES: dict[str, tuple[Edge, ...]] = {
    "g4-path": ((0, 1), (1, 2), (2, 3)),
    "g4-star": ((0, 1), (0, 2), (0, 3)),
    "g4-cycle": ((0, 1), (1, 2), (2, 3), (0, 3)),
    "g4-paw": ((0, 1), (0, 2), (1, 2), (0, 3)),
    "g4-diamond": ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3)),
    "g4-complete": ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
}

# Triad codes: mutual, asymmetric and null dyad counts plus a shape letter.
# Vertices a, b, c are 0, 1, 2.
TRIAD_EDGES: dict[str, tuple[str, ...]] = {
    "021D": ("ba", "bc"),
    "021U": ("ab", "cb"),
    "021C": ("ab", "bc"),
    "111D": ("ac", "ca", "bc"),
    "111U": ("ac", "ca", "cb"),
    "030T": ("ab", "cb", "ac"),
    "030C": ("ba", "cb", "ac"),
    "201": ("ab", "ba", "ac", "ca"),
    "120D": ("bc", "ba", "ac", "ca"),
    "120U": ("ab", "cb", "ac", "ca"),
    "120C": ("ab", "bc", "ac", "ca"),
    "210": ("ab", "bc", "cb", "ac", "ca"),
    "300": ("ab", "ba", "bc", "cb", "ac", "ca"),
}


def _canonical_code(order: int, edges: Iterable[Edge]) -> tuple[Edge, ...]:
    edges = list(edges)
    best = None
    for perm in itertools.permutations(range(order)):
        code = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or code < best:
            best = code
    return best or ()


@cache
def _graphs_on_four_vertices() -> tuple[tuple[Edge, ...], ...]:
    """All 11 graphs on 4 vertices up to isomorphism, ordered by edge count."""
    pairs = list(itertools.combinations(range(4), 2))
    seen = set()
    for k in range(len(pairs) + 1):
        for subset in itertools.combinations(pairs, k):
            seen.add(_canonical_code(4, subset))
    return tuple(sorted(seen, key=lambda code: (len(code), code)))


def g5_patterns() -> list[Pattern]:
    """5-node graphs where vertex 0 is adjacent to every other vertex."""
    patterns = []
    for i, rest in enumerate(_graphs_on_four_vertices(), start=1):
        edges = [(0, v) for v in range(1, 5)]
        edges += [(u + 1, v + 1) for u, v in rest]
        patterns.append(Pattern(5, tuple(edges), name=f"g5-{i:02d}"))
    return patterns


def g4_patterns() -> list[Pattern]:
    return [Pattern(4, edges, name=name) for name, edges in G4_EDGES.items()]


def triad_patterns(count_mode: CountMode = CountMode.Induced) -> list[Pattern]:
    index = {"a": 0, "b": 1, "c": 2}
    return [
        Pattern(
            3,
            tuple((index[arc[0]], index[arc[1]]) for arc in arcs),
            directed=True,
            count_mode=count_mode,
            name=f"d3-{code}",
        )
        for code, arcs in TRIAD_EDGES.items()
    ]


def star(leaves: int) -> Pattern:
    return Pattern(
        leaves + 1,
        tuple((0, v) for v in range(1, leaves + 1)),
        count_mode=CountMode.NonInduced,
        name=f"star-{leaves}",
    )


def clique(order: int) -> Pattern:
    """Maximal clique of the given order."""
    return Pattern(
        order,
        tuple(itertools.combinations(range(order), 2)),
        count_mode=CountMode.MaximalClique,
        name=f"clique-{order}",
    )


def get_pattern(name: str) -> Pattern:
    fixed = {
        "edge": Pattern(2, ((0, 1),), name="edge"),
        "triangle": Pattern(3, ((0, 1), (1, 2), (0, 2)), name="triangle"),
        "path3": Pattern(3, ((0, 1), (1, 2)), name="path3"),
        "path3-noninduced": Pattern(
            3, ((0, 1), (1, 2)), count_mode=CountMode.NonInduced, name="path3-noninduced"
        ),
        "feedforward": Pattern(
            3, ((0, 1), (0, 2), (1, 2)), directed=True, name="feedforward"
        ),
    }
    if name in fixed:
        return fixed[name]
    for family in (g4_patterns(), g5_patterns(), triad_patterns()):
        for pattern in family:
            if pattern.name == name:
                return pattern
    prefix, _, size = name.rpartition("-")
    if size.isdigit():
        if prefix == "clique":
            return clique(int(size))
        if prefix == "star":
            return star(int(size))
        if prefix == "complete":
            return Pattern.complete(int(size))
    raise KeyError(f"Unknown catalog pattern: {name!r}")


def measurable(patterns: Iterable[Pattern], mode: NeighborhoodMode) -> list[Pattern]:
    """The patterns that have at least one observable orbit under `mode`."""
    return [
        p
        for p in patterns
        if observable_orbits(automorphism_orbits(p), p, mode)
    ]
