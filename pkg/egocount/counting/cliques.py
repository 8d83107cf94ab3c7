"""Maximal cliques through the ego, by Bron-Kerbosch with Tomita pivoting."""

from __future__ import annotations

import typing

from egocount.errors import ModeMismatchError

if typing.TYPE_CHECKING:
    from egocount.graph import Egonet


def enumerate_maximal_cliques(e: Egonet) -> list[frozenset[int]]:
    """Every maximal clique of the egonet that contains the ego, as sets of local
    indices sorted by their ascending member tuples.

    Under the full neighborhood every clique containing the ego lies inside its
    egonet, so these are exactly the maximal cliques of G through the ego.
    """
    if e.directed:
        raise ModeMismatchError("Maximal cliques are only defined for undirected egonets")
    adjacency = e.out_sets
    cliques: list[frozenset[int]] = []

    def expand(r: frozenset[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            cliques.append(r)
            return
        pivot = max(p | x, key=lambda u: (len(p & adjacency[u]), -u))
        for v in sorted(p - adjacency[pivot]):
            expand(r | {v}, p & adjacency[v], x & adjacency[v])
            p.discard(v)
            x.add(v)

    expand(frozenset({0}), set(adjacency[0]), set())
    return sorted(cliques, key=sorted)
