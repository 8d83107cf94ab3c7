"""Backtracking enumeration of pattern embeddings inside one egonet."""

from __future__ import annotations

import typing
from dataclasses import dataclass
from functools import lru_cache

if typing.TYPE_CHECKING:
    from typing import Iterator

    from egocount.graph import Egonet
    from egocount.pattern import CompositionMatrix, Pattern

    Edge = tuple[int, int]
    LocalKey = tuple[tuple[int, ...], tuple[Edge, ...]]


@dataclass(frozen=True)
class SearchPlan:
    pattern: Pattern
    order: tuple[int, ...]
    """Pattern vertices in visiting order; order[0] is the root."""

    earlier: tuple[tuple[int, ...], ...]
    """Per pattern vertex: the vertices visited before it."""

    anchor: tuple[tuple[int, bool] | None, ...]
    """Per pattern vertex: an earlier neighbor z and whether the edge runs z -> x.
    Candidates are drawn from the image of z."""

    above: tuple[int | None, ...]
    """Per pattern vertex: an earlier twin whose image must be smaller."""


@lru_cache(maxsize=512)
def search_plan(pattern: Pattern, root: int) -> SearchPlan:
    """Connectivity-first visiting order starting at `root`."""
    h = pattern.order

    def linked(x: int, z: int) -> bool:
        return pattern.has_edge(x, z) or pattern.has_edge(z, x)

    order = [root]
    remaining = set(range(h)) - {root}
    while remaining:
        x = max(
            remaining,
            key=lambda v: (
                sum(linked(v, z) for z in order),
                len(pattern.out_sets[v] | pattern.in_sets[v]),
                -v,
            ),
        )
        order.append(x)
        remaining.remove(x)

    position = {v: i for i, v in enumerate(order)}
    earlier: list[tuple[int, ...]] = [()] * h
    anchor: list[tuple[int, bool] | None] = [None] * h
    for i, x in enumerate(order):
        earlier[x] = tuple(order[:i])
        for z in order[:i]:
            if pattern.has_edge(z, x):
                anchor[x] = (z, True)
                break
            if pattern.has_edge(x, z):
                anchor[x] = (z, False)
                break

    above: list[int | None] = [None] * h
    for cls in pattern.twin_classes:
        members = sorted((v for v in cls if v != root), key=position.__getitem__)
        for prev, cur in zip(members, members[1:]):
            above[cur] = prev

    return SearchPlan(pattern, tuple(order), tuple(earlier), tuple(anchor), tuple(above))


def iter_embeddings(
    plan: SearchPlan,
    target: Egonet,
    composition: CompositionMatrix,
    orbit_of: tuple[int, ...],
    root_image: int = 0,
) -> Iterator[tuple[int, ...]]:
    """Yields images (indexed by pattern vertex) of the pattern in `target`, with
    the root mapped to `root_image` and each orbit's states matching its row of
    the composition matrix. Every copy is produced at least once; twins are only
    enumerated in increasing image order."""
    pattern = plan.pattern
    h = pattern.order
    induced = pattern.count_mode.induced
    out_sets, in_sets = target.out_sets, target.in_sets
    states = target.states if composition.annotated else (1,) * target.size
    remaining = [dict(row) for row in composition.row_states]
    image = [-1] * h
    used = [False] * target.size

    def fits(x: int, y: int) -> bool:
        if used[y]:
            return False
        if remaining[orbit_of[x]].get(states[y], 0) <= 0:
            return False
        if len(out_sets[y]) < len(pattern.out_sets[x]) or len(in_sets[y]) < len(
            pattern.in_sets[x]
        ):
            return False
        twin = plan.above[x]
        if twin is not None and y <= image[twin]:
            return False
        for z in plan.earlier[x]:
            yz = image[z]
            forward = yz in out_sets[y]
            backward = y in out_sets[yz]
            if pattern.has_edge(x, z):
                if not forward:
                    return False
            elif induced and forward:
                return False
            if pattern.directed:
                if pattern.has_edge(z, x):
                    if not backward:
                        return False
                elif induced and backward:
                    return False
        return True

    def assign(x: int, y: int) -> None:
        image[x] = y
        used[y] = True
        remaining[orbit_of[x]][states[y]] -= 1

    def release(x: int, y: int) -> None:
        image[x] = -1
        used[y] = False
        remaining[orbit_of[x]][states[y]] += 1

    def candidates(x: int) -> typing.Iterable[int]:
        link = plan.anchor[x]
        if link is None:
            return range(target.size)
        z, z_to_x = link
        return out_sets[image[z]] if z_to_x else in_sets[image[z]]

    def extend(position: int) -> Iterator[tuple[int, ...]]:
        if position == h:
            yield tuple(image)
            return
        x = plan.order[position]
        for y in candidates(x):
            if fits(x, y):
                assign(x, y)
                yield from extend(position + 1)
                release(x, y)

    root = plan.order[0]
    if not fits(root, root_image):
        return
    assign(root, root_image)
    yield from extend(1)
    release(root, root_image)


def local_key(pattern: Pattern, image: tuple[int, ...]) -> LocalKey:
    """Identifies the copy an embedding lands on: its vertex set, plus its edge set
    for non-induced counting (distinct copies may then share a vertex set)."""
    vertices = tuple(sorted(image))
    if pattern.count_mode.induced:
        return vertices, ()
    if pattern.directed:
        edges = sorted((image[u], image[v]) for u, v in pattern.edges)
    else:
        edges = sorted(
            (min(image[u], image[v]), max(image[u], image[v])) for u, v in pattern.edges
        )
    return vertices, tuple(edges)
