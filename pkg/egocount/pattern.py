"""The target subgraph H: orbit structure, observable roles and composition
matrices."""

from __future__ import annotations

import itertools
import json
import typing
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, model_validator

from egocount.errors import (
    CompositionRowSumMismatch,
    DimensionMismatch,
    EmptyObservableSet,
    PatternTooLargeError,
)
from egocount.graph import NeighborhoodMode, check_mode

if typing.TYPE_CHECKING:
    from typing import Iterator, Sequence

    Edge = tuple[int, int]

DEFAULT_ORDER_CAP = 8


class CountMode(str, Enum):
    Induced = "induced"
    NonInduced = "non_induced"
    MaximalClique = "maximal_clique"
    """Induced complete H whose copies must be maximal cliques."""

    @property
    def induced(self) -> bool:
        return self is not CountMode.NonInduced


@dataclass(frozen=True)
class Pattern:
    order: int
    edges: tuple[Edge, ...]
    directed: bool = False
    count_mode: CountMode = CountMode.Induced
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"Pattern order must be at least 2, got {self.order}")
        normalized = set()
        for u, v in self.edges:
            if not (0 <= u < self.order and 0 <= v < self.order):
                raise ValueError(f"Pattern edge ({u}, {v}) outside 0..{self.order - 1}")
            if u == v:
                raise ValueError(f"Pattern edge ({u}, {v}) is a loop")
            normalized.add((u, v) if self.directed else (min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        object.__setattr__(self, "count_mode", CountMode(self.count_mode))

        if self.count_mode is CountMode.MaximalClique:
            if self.directed:
                raise ValueError("Maximal clique patterns must be undirected")
            if not self.is_complete():
                raise ValueError("Maximal clique patterns must be complete graphs")

    @classmethod
    def complete(cls, order: int, count_mode: CountMode = CountMode.Induced) -> Pattern:
        return cls(
            order,
            tuple(itertools.combinations(range(order), 2)),
            count_mode=count_mode,
            name=f"complete-{order}",
        )

    @cached_property
    def out_sets(self) -> tuple[frozenset[int], ...]:
        sets: list[set[int]] = [set() for _ in range(self.order)]
        for u, v in self.edges:
            sets[u].add(v)
            if not self.directed:
                sets[v].add(u)
        return tuple(frozenset(s) for s in sets)

    @cached_property
    def in_sets(self) -> tuple[frozenset[int], ...]:
        if not self.directed:
            return self.out_sets
        sets: list[set[int]] = [set() for _ in range(self.order)]
        for u, v in self.edges:
            sets[v].add(u)
        return tuple(frozenset(s) for s in sets)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_sets[u]

    def is_complete(self) -> bool:
        pairs = self.order * (self.order - 1)
        return len(self.edges) == (pairs if self.directed else pairs // 2)

    def relabeled(self, permutation: Sequence[int]) -> Pattern:
        """The same pattern with vertex v renamed to permutation[v]."""
        return replace(
            self,
            edges=tuple((permutation[u], permutation[v]) for u, v in self.edges),
        )

    def are_twins(self, x: int, y: int) -> bool:
        """True when swapping x and y is an automorphism."""
        if self.has_edge(x, y) != self.has_edge(y, x):
            return False
        return (
            self.out_sets[x] - {y} == self.out_sets[y] - {x}
            and self.in_sets[x] - {y} == self.in_sets[y] - {x}
        )

    @cached_property
    def twin_classes(self) -> tuple[tuple[int, ...], ...]:
        classes: list[list[int]] = []
        for v in range(self.order):
            for cls in classes:
                if all(self.are_twins(v, w) for w in cls):
                    cls.append(v)
                    break
            else:
                classes.append([v])
        return tuple(tuple(cls) for cls in classes)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        arrow = "->" if self.directed else "-"
        return f"h{self.order}:" + ",".join(f"{u}{arrow}{v}" for u, v in self.edges)


@dataclass(frozen=True)
class OrbitStructure:
    orbit_of: tuple[int, ...]
    """Orbit index of each pattern vertex. Orbits are numbered by smallest member."""

    multiplicities: tuple[int, ...]
    observable: tuple[int, ...] | None = None
    """Indices of the observable orbits (R), once a neighborhood mode is fixed."""

    @property
    def orbit_count(self) -> int:
        return len(self.multiplicities)

    def members(self, orbit: int) -> tuple[int, ...]:
        return tuple(v for v, o in enumerate(self.orbit_of) if o == orbit)

    def with_observable(self, observable: Sequence[int]) -> OrbitStructure:
        return replace(self, observable=tuple(observable))

    def _require_observable(self) -> tuple[int, ...]:
        if self.observable is None:
            raise ValueError("Observable orbits have not been computed")
        return self.observable

    @property
    def observable_multiplicities(self) -> tuple[int, ...]:
        return tuple(self.multiplicities[j] for j in self._require_observable())

    @property
    def multiplicity_sum(self) -> int:
        return sum(self.observable_multiplicities)


@dataclass(frozen=True)
class CompositionMatrix:
    """a x p matrix; entry (i, j) is the number of orbit-i members in state j + 1."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if not rows or not rows[0]:
            raise DimensionMismatch("Composition matrix is empty")
        if any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatch("Composition matrix rows have different lengths")
        if any(x < 0 for row in rows for x in row):
            raise DimensionMismatch("Composition matrix entries must be non-negative")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def unannotated(cls, orbits: OrbitStructure) -> CompositionMatrix:
        return cls(tuple((m,) for m in orbits.multiplicities))

    @property
    def state_count(self) -> int:
        return len(self.rows[0])

    @property
    def annotated(self) -> bool:
        """A single-column matrix ignores vertex states."""
        return self.state_count > 1

    @property
    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.rows)

    @cached_property
    def row_states(self) -> tuple[Counter[int], ...]:
        """Required state multiset of each orbit (states are 1-based)."""
        return tuple(
            Counter({state + 1: k for state, k in enumerate(row) if k})
            for row in self.rows
        )


def _automorphisms(pat: Pattern) -> Iterator[tuple[int, ...]]:
    h = pat.order
    signature = [(len(pat.out_sets[v]), len(pat.in_sets[v])) for v in range(h)]
    image = [-1] * h
    used = [False] * h

    def consistent(v: int, w: int) -> bool:
        for x in range(v):
            if pat.has_edge(v, x) != pat.has_edge(w, image[x]):
                return False
            if pat.has_edge(x, v) != pat.has_edge(image[x], w):
                return False
        return True

    def extend(v: int) -> Iterator[tuple[int, ...]]:
        if v == h:
            yield tuple(image)
            return
        for w in range(h):
            if used[w] or signature[w] != signature[v] or not consistent(v, w):
                continue
            image[v] = w
            used[w] = True
            yield from extend(v + 1)
            used[w] = False
        image[v] = -1

    yield from extend(0)


def automorphism_orbits(pat: Pattern, cap: int = DEFAULT_ORDER_CAP) -> OrbitStructure:
    """Exact automorphism orbits by exhaustive permutation search (pruned by
    degree signature and adjacency to already mapped vertices)."""
    h = pat.order
    if pat.is_complete():
        return OrbitStructure((0,) * h, (h,))
    if h > cap:
        raise PatternTooLargeError(f"Pattern order {h} exceeds the cap of {cap}")

    parent = list(range(h))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for perm in _automorphisms(pat):
        for v, w in enumerate(perm):
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[max(rv, rw)] = min(rv, rw)

    roots: dict[int, int] = {}
    orbit_of = []
    for v in range(h):
        orbit_of.append(roots.setdefault(find(v), len(roots)))
    multiplicities = Counter(orbit_of)
    return OrbitStructure(
        tuple(orbit_of), tuple(multiplicities[i] for i in range(len(roots)))
    )


def _spans(pat: Pattern, v: int, mode: NeighborhoodMode) -> bool:
    for w in range(pat.order):
        if w == v:
            continue
        match mode:
            case NeighborhoodMode.UndirectedFull | NeighborhoodMode.DirectedOut:
                ok = pat.has_edge(v, w)
            case NeighborhoodMode.DirectedUnion:
                ok = pat.has_edge(v, w) or pat.has_edge(w, v)
            case NeighborhoodMode.DirectedIn:
                ok = pat.has_edge(w, v)
        if not ok:
            return False
    return True


def observable_orbits(
    orb: OrbitStructure, pat: Pattern, mode: NeighborhoodMode
) -> tuple[int, ...]:
    """Orbits whose every member is adjacent, in the sense `mode` measures, to
    all other vertices of H."""
    check_mode(pat.directed, mode)
    return tuple(
        i
        for i in range(orb.orbit_count)
        if all(_spans(pat, v, mode) for v in orb.members(i))
    )


def validate_pattern(
    pat: Pattern,
    orb: OrbitStructure,
    u: CompositionMatrix,
    mode: NeighborhoodMode,
) -> OrbitStructure:
    """Checks that H is measurable under `mode` and that U fits its orbits.
    Returns the orbit structure with the observable roles filled in."""
    observable = observable_orbits(orb, pat, mode)
    if not observable:
        raise EmptyObservableSet(
            f"Pattern {pat.label} has no observable orbit under {mode.value}"
        )
    if len(u.rows) != orb.orbit_count:
        raise DimensionMismatch(
            f"Composition matrix has {len(u.rows)} rows, pattern has {orb.orbit_count} orbits"
        )
    if u.row_sums != orb.multiplicities:
        raise CompositionRowSumMismatch(
            f"Composition row sums {list(u.row_sums)} differ from multiplicities {list(orb.multiplicities)}"
        )
    return orb.with_observable(observable)


def enumerate_compositions(
    multiplicities: Sequence[int], state_count: int
) -> list[CompositionMatrix]:
    """Every composition matrix with the given row sums and `state_count` columns."""

    def splits(total: int) -> list[tuple[int, ...]]:
        # stars and bars
        result = []
        for bars in itertools.combinations(range(total + state_count - 1), state_count - 1):
            edges = (-1, *bars, total + state_count - 1)
            result.append(tuple(b - a - 1 for a, b in itertools.pairwise(edges)))
        return result

    return [
        CompositionMatrix(rows)
        for rows in itertools.product(*(splits(m) for m in multiplicities))
    ]


@dataclass(frozen=True)
class PatternSpec:
    """Everything that identifies what is being counted."""

    pattern: Pattern
    orbits: OrbitStructure
    """Orbit structure with observable roles filled in."""

    composition: CompositionMatrix
    mode: NeighborhoodMode

    @classmethod
    def build(
        cls,
        pattern: Pattern,
        mode: NeighborhoodMode | str | None = None,
        composition: Sequence[Sequence[int]] | CompositionMatrix | None = None,
        cap: int = DEFAULT_ORDER_CAP,
    ) -> PatternSpec:
        if mode is None:
            mode = (
                NeighborhoodMode.DirectedUnion
                if pattern.directed
                else NeighborhoodMode.UndirectedFull
            )
        mode = NeighborhoodMode.parse(mode)
        orbits = automorphism_orbits(pattern, cap)
        if composition is None:
            u = CompositionMatrix.unannotated(orbits)
        elif isinstance(composition, CompositionMatrix):
            u = composition
        else:
            u = CompositionMatrix(tuple(tuple(row) for row in composition))
        orbits = validate_pattern(pattern, orbits, u, mode)
        return cls(pattern, orbits, u, mode)

    @property
    def identity(self) -> str:
        rows = ";".join(",".join(map(str, row)) for row in self.composition.rows)
        return f"{self.pattern.label}|{self.pattern.count_mode.value}|{self.mode.value}|U={rows}"

    @property
    def multiplicity_sum(self) -> int:
        return self.orbits.multiplicity_sum


class PatternFile(BaseModel):
    """JSON pattern description."""

    model_config = ConfigDict(extra="forbid")

    name: str = ""
    catalog: str | None = None
    directed: bool = False
    order: int | None = None
    edges: list[tuple[int, int]] = []
    count_mode: CountMode = CountMode.Induced
    composition: list[list[int]] | Literal["unannotated"] = "unannotated"
    mode: NeighborhoodMode | None = None

    @model_validator(mode="after")
    def _catalog_stands_alone(self) -> Self:
        if self.catalog is not None:
            clash = sorted({"directed", "order", "edges", "count_mode"} & self.model_fields_set)
            if clash:
                raise ValueError(
                    f"Catalog pattern {self.catalog!r} cannot be combined with {', '.join(clash)}"
                )
        return self

    def to_spec(
        self, cap: int = DEFAULT_ORDER_CAP, mode: NeighborhoodMode | str | None = None
    ) -> PatternSpec:
        if self.catalog is not None:
            from egocount.catalog import get_pattern

            pattern = get_pattern(self.catalog)
        else:
            order = self.order
            if order is None:
                order = 1 + max((max(e) for e in self.edges), default=0)
            pattern = Pattern(
                order,
                tuple(self.edges),
                directed=self.directed,
                count_mode=self.count_mode,
                name=self.name,
            )
        composition = None if self.composition == "unannotated" else self.composition
        return PatternSpec.build(pattern, mode or self.mode, composition, cap)


def read_pattern(
    reference: str | Path,
    cap: int = DEFAULT_ORDER_CAP,
    mode: NeighborhoodMode | str | None = None,
) -> PatternSpec:
    """Reads a pattern file, or a built-in pattern given as "catalog:NAME". A given
    `mode` replaces the one in the file."""
    text = str(reference)
    if text.startswith("catalog:"):
        return PatternFile(catalog=text.removeprefix("catalog:")).to_spec(cap, mode)
    with open(reference, "r") as f:
        data = json.load(f)
    return PatternFile(**data).to_spec(cap, mode)
