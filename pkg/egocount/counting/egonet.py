"""Per-egonet subgraph counting: role degrees and labeled copies."""

from __future__ import annotations

import typing
from collections import Counter
from dataclasses import dataclass, field

from egocount.counting.cliques import enumerate_maximal_cliques
from egocount.counting.embedding import iter_embeddings, local_key, search_plan
from egocount.errors import InducedCountingUnsupported, ModeMismatchError, UnlabeledSample
from egocount.graph import NeighborhoodMode
from egocount.pattern import CountMode

if typing.TYPE_CHECKING:
    from typing import Iterator

    from egocount.counting.embedding import LocalKey
    from egocount.graph import Egonet
    from egocount.pattern import PatternSpec

    Edge = tuple[int, int]

RoleDegreeVector = tuple[int, ...]
"""Copies of H in an egonet with the ego in each observable role, in the order of
the observable orbits."""


@dataclass(frozen=True, order=True)
class CopyKey:
    """Label-based identity of a copy of H, comparable across egonets."""

    pattern: str
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...] = ()
    """Only filled for non-induced counting."""

    anchors: tuple[int, ...] = field(default=(), compare=False)
    """Labels of the members sitting in observable roles. A copy is seen by exactly
    the egos among them."""


@dataclass(frozen=True)
class EgonetCount:
    degrees: RoleDegreeVector
    copies: frozenset[CopyKey] | None
    """None when the egonet is unlabeled."""


def check_counting_mode(e: Egonet, spec: PatternSpec) -> None:
    if e.mode is not spec.mode:
        raise ModeMismatchError(
            f"Egonet was sampled under {e.mode.value}, pattern expects {spec.mode.value}"
        )
    if spec.pattern.count_mode is CountMode.Induced and spec.mode in (
        NeighborhoodMode.DirectedOut,
        NeighborhoodMode.DirectedIn,
    ):
        # Arcs between alters against the neighborhood direction are not observed
        raise InducedCountingUnsupported(
            f"Induced counting is not available under {spec.mode.value}; "
            "use non-induced counting"
        )


def _local_copies(e: Egonet, spec: PatternSpec) -> Iterator[tuple[int, LocalKey, frozenset[int]]]:
    """Yields (role, key, anchors) for every embedding with the ego in an
    observable role. Keys repeat across automorphic embeddings."""
    pattern = spec.pattern
    orbits = spec.orbits
    observable = orbits.observable or ()

    if pattern.count_mode is CountMode.MaximalClique:
        wanted = spec.composition.row_states[0]
        for clique in enumerate_maximal_cliques(e):
            if len(clique) != pattern.order:
                continue
            found = Counter(e.states[v] if spec.composition.annotated else 1 for v in clique)
            if found == wanted:
                yield 0, (tuple(sorted(clique)), ()), clique
        return

    anchored = [v for v in range(pattern.order) if orbits.orbit_of[v] in observable]
    for role, orbit in enumerate(observable):
        root = orbits.members(orbit)[0]
        plan = search_plan(pattern, root)
        for image in iter_embeddings(plan, e, spec.composition, orbits.orbit_of):
            yield role, local_key(pattern, image), frozenset(image[v] for v in anchored)


def _labeled(e: Egonet, spec: PatternSpec, key: LocalKey, anchors: frozenset[int]) -> CopyKey:
    labels = typing.cast("tuple[int, ...]", e.labels)
    vertices, edges = key
    if spec.pattern.directed:
        mapped = sorted((labels[u], labels[v]) for u, v in edges)
    else:
        mapped = sorted(
            (min(labels[u], labels[v]), max(labels[u], labels[v])) for u, v in edges
        )
    return CopyKey(
        pattern=spec.identity,
        vertices=tuple(sorted(labels[v] for v in vertices)),
        edges=tuple(mapped),
        anchors=tuple(sorted(labels[v] for v in anchors)),
    )


def count_egonet(e: Egonet, spec: PatternSpec, with_copies: bool = True) -> EgonetCount:
    """Role degrees and, for labeled egonets, the copies seen, from one search."""
    check_counting_mode(e, spec)
    per_role: list[set[LocalKey]] = [set() for _ in spec.orbits.observable or ()]
    anchors: dict[LocalKey, frozenset[int]] = {}
    for role, key, anchor_set in _local_copies(e, spec):
        per_role[role].add(key)
        anchors.setdefault(key, anchor_set)

    degrees = tuple(len(keys) for keys in per_role)
    copies = None
    if with_copies and e.labeled:
        copies = frozenset(_labeled(e, spec, key, a) for key, a in anchors.items())
    return EgonetCount(degrees, copies)


def role_degrees(e: Egonet, spec: PatternSpec) -> RoleDegreeVector:
    """d_j: copies of H in `e` where the ego occupies observable role j."""
    return count_egonet(e, spec, with_copies=False).degrees


def unique_copies(e: Egonet, spec: PatternSpec) -> frozenset[CopyKey]:
    """Every copy of H with the ego in an observable role, identified by labels."""
    if not e.labeled:
        raise UnlabeledSample(f"Egonet of ego {e.ego} carries no alter labels")
    copies = count_egonet(e, spec).copies
    assert copies is not None
    return copies
