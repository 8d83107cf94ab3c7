"""Repeated sampling of a known population graph, to measure estimator error.

Egonets depend only on the graph, so every vertex's counts and copies are
computed once up front. Replications then only draw samples and aggregate.
"""

from __future__ import annotations

import logging
import typing
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from egocount.config import read_config
from egocount.counting import DEFAULT_BUDGET, count_egonet, exact_count
from egocount.errors import SampleSizeError, UndefinedMetric
from egocount.estimation import (
    Estimator,
    copy_inclusion_prob,
    estimate_role_occupancy,
    estimate_unique_counting,
)
from egocount.evaluation.generators import erdos_renyi, heterogeneous
from egocount.evaluation.metrics import nmae_per_replication, nrmse, rmse
from egocount.graph import NeighborhoodMode, extract_egonet, largest_component, load_graph_file
from egocount.parallel import map_ordered
from egocount.pattern import PatternSpec, read_pattern
from egocount.sampling import (
    SampleDesign,
    UISDesign,
    WISDesign,
    sample_egos,
    vertex_weights,
)

if typing.TYPE_CHECKING:
    from typing import Callable, Sequence

    from egocount.counting import CopyKey
    from egocount.graph import Graph
    from egocount.progress import Progress

    Edge = tuple[int, int]

logger = logging.getLogger(__name__)


class GraphSource(BaseModel):
    """A graph file, or a synthetic generator with its parameters."""

    model_config = ConfigDict(extra="forbid")

    path: str | None = None
    attributes: str | None = None
    directed: bool = False
    generator: Literal["erdos_renyi", "heterogeneous"] | None = None
    vertices: int | None = Field(default=None, ge=2)
    p: float | None = Field(default=None, gt=0, le=1)
    m: int | None = Field(default=None, ge=1)
    states: int = Field(default=1, ge=1)
    seed: int = 0
    largest_component: bool = True

    def load(self) -> Graph:
        if self.path is not None:
            g = load_graph_file(self.path, self.attributes, self.directed)
            return largest_component(g) if self.largest_component else g
        match self.generator:
            case "erdos_renyi" if self.vertices and self.p:
                return erdos_renyi(
                    self.vertices, self.p, self.seed, self.states, self.directed
                )
            case "heterogeneous" if self.vertices and self.m:
                return heterogeneous(self.vertices, self.m, self.seed, self.states)
        raise ValueError(
            "Graph source needs a path, or a generator with vertices and p (erdos_renyi) "
            "or m (heterogeneous)"
        )


class SimulationSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: GraphSource
    patterns: list[str] = Field(min_length=1)
    """Pattern files or catalog:NAME references. NMAE treats them as one vector."""

    mode: NeighborhoodMode | None = None
    design: SampleDesign = Field(default_factory=UISDesign)
    grid: list[int] | None = None
    """Numbers of draws n'. Doubling from `grid_start` up to N when unset."""

    grid_start: int = Field(default=125, ge=1)
    replications: int = Field(default=1000, ge=1)
    estimators: list[Estimator] = Field(
        default_factory=lambda: [Estimator.RoleOccupancy], min_length=1
    )
    truth: Literal["oracle", "census"] = "oracle"
    """How true counts are obtained: the brute-force oracle, or the sum of every
    vertex's role degrees divided by sum m_j."""

    seed: int = 0
    budget: int = DEFAULT_BUDGET

    def grid_points(self, population_size: int) -> list[int]:
        N = population_size
        if self.grid is None:
            points = []
            k = self.grid_start
            while k < N:
                points.append(k)
                k *= 2
            points.append(N)
            return points
        points = sorted(set(self.grid))
        if points[0] < 1:
            raise SampleSizeError(f"Grid points must be at least 1, got {points[0]}")
        without_replacement = isinstance(self.design, UISDesign | WISDesign) and not self.design.replace
        if without_replacement and points[-1] > N:
            raise SampleSizeError(
                f"Grid point {points[-1]} exceeds the population of {N} vertices"
            )
        return points


def load_simulation_spec(path: str | Path) -> SimulationSpec:
    """Reads a simulation spec; relative file references resolve against its folder."""
    spec = read_config(path, SimulationSpec)
    base = Path(path).parent

    def resolve(ref: str | None) -> str | None:
        if ref is None or ref.startswith("catalog:") or Path(ref).is_absolute():
            return ref
        return str(base / ref)

    graph = spec.graph.model_copy(
        update=dict(path=resolve(spec.graph.path), attributes=resolve(spec.graph.attributes))
    )
    patterns = [typing.cast(str, resolve(p)) for p in spec.patterns]
    return spec.model_copy(update=dict(graph=graph, patterns=patterns))


class ReportRow(BaseModel):
    pattern: str
    estimator: str
    design: str
    grid_point: int
    metric: str
    value: float
    mean_estimate: float | None = None
    truth: float | None = None
    node_coverage: float
    edge_coverage: float


@dataclass(frozen=True)
class VertexSummary:
    degree_sums: tuple[int, ...]
    """Per pattern: sum of the vertex's role degrees."""

    copies: tuple[frozenset[CopyKey], ...] | None
    members: tuple[int, ...]
    edges: tuple[Edge, ...]
    """Edges of the vertex's egonet in compact ids."""


@dataclass(frozen=True)
class Replication:
    grid_index: int
    estimates: tuple[tuple[float, ...], ...]
    """Per estimator, per pattern."""

    node_coverage: float
    edge_coverage: float


@dataclass(frozen=True)
class _Context:
    graph: Graph
    specs: tuple[PatternSpec, ...]
    design: SampleDesign
    estimators: tuple[Estimator, ...]
    summaries: tuple[VertexSummary, ...] = ()


_CONTEXT: _Context | None = None
_WEIGHT_OF: Callable[[int], float] | None = None


def _init_context(context: _Context) -> None:
    global _CONTEXT, _WEIGHT_OF
    _CONTEXT = context
    _WEIGHT_OF = None
    if not context.design.uniform and Estimator.UniqueCounting in context.estimators:
        g = context.graph
        weights = vertex_weights(g, context.design)

        def weight_of(label: int) -> float:
            return float(weights[g.index_of(label)])

        _WEIGHT_OF = weight_of


def _summarize(v: int) -> VertexSummary:
    assert _CONTEXT is not None
    g, specs = _CONTEXT.graph, _CONTEXT.specs
    with_copies = Estimator.UniqueCounting in _CONTEXT.estimators
    egonets = {}
    sums = []
    copies = []
    for spec in specs:
        e = egonets.get(spec.mode)
        if e is None:
            e = egonets[spec.mode] = extract_egonet(g, v, spec.mode)
        count = count_egonet(e, spec, with_copies=with_copies)
        sums.append(sum(count.degrees))
        copies.append(count.copies or frozenset())
    first = egonets[specs[0].mode]
    members = first.members
    if g.directed:
        edges = tuple((members[i], members[j]) for i, j in first.edges)
    else:
        edges = tuple(
            (min(members[i], members[j]), max(members[i], members[j])) for i, j in first.edges
        )
    return VertexSummary(
        degree_sums=tuple(sums),
        copies=tuple(copies) if with_copies else None,
        members=members,
        edges=edges,
    )


def _replicate(task: tuple[int, int, np.random.SeedSequence]) -> Replication:
    assert _CONTEXT is not None
    grid_index, n_prime, seed = task
    g, specs, summaries = _CONTEXT.graph, _CONTEXT.specs, _CONTEXT.summaries
    sample = sample_egos(g, _CONTEXT.design, n_prime, seed)
    egos = sample.unique_egos

    estimates = []
    for estimator in _CONTEXT.estimators:
        row = []
        for i, spec in enumerate(specs):
            if estimator is Estimator.RoleOccupancy:
                report = estimate_role_occupancy(
                    [(summaries[v].degree_sums[i],) for v in egos],
                    sample.inclusion,
                    spec.multiplicity_sum,
                )
            else:
                copies: set[CopyKey] = set()
                for v in egos:
                    copies |= typing.cast("tuple[frozenset[CopyKey], ...]", summaries[v].copies)[i]
                report = estimate_unique_counting(
                    [copy_inclusion_prob(sample, key, _WEIGHT_OF) for key in sorted(copies)],
                    spec.multiplicity_sum,
                )
            row.append(report.estimate)
        estimates.append(tuple(row))

    nodes: set[int] = set()
    edges: set[Edge] = set()
    for v in egos:
        nodes.update(summaries[v].members)
        edges.update(summaries[v].edges)
    edge_total = g.edge_count
    return Replication(
        grid_index=grid_index,
        estimates=tuple(estimates),
        node_coverage=len(nodes) / g.vertex_count,
        edge_coverage=len(edges) / edge_total if edge_total else 0.0,
    )


def precompute(
    g: Graph,
    specs: Sequence[PatternSpec],
    estimators: Sequence[Estimator],
    design: SampleDesign,
    workers: int = 1,
) -> tuple[VertexSummary, ...]:
    context = _Context(g, tuple(specs), design, tuple(estimators))
    return tuple(
        map_ordered(
            _summarize,
            range(g.vertex_count),
            workers,
            initializer=_init_context,
            initargs=(context,),
        )
    )


def true_counts(
    g: Graph,
    specs: Sequence[PatternSpec],
    summaries: Sequence[VertexSummary],
    truth: Literal["oracle", "census"],
    budget: int = DEFAULT_BUDGET,
) -> list[float]:
    if truth == "oracle":
        return [float(exact_count(g, spec, budget)) for spec in specs]
    return [
        sum(s.degree_sums[i] for s in summaries) / spec.multiplicity_sum
        for i, spec in enumerate(specs)
    ]


def run_simulation(
    spec: SimulationSpec,
    workers: int = 1,
    progress: Progress | None = None,
    graph: Graph | None = None,
) -> list[ReportRow]:
    """k replications of sample, count and estimate at every grid point.

    Rows come out ordered by estimator, grid point and pattern, followed by the
    NMAE rows of the whole pattern vector. The rows depend only on `spec`.
    """
    g = graph if graph is not None else spec.graph.load()
    specs = [
        read_pattern(ref) if spec.mode is None else _with_mode(read_pattern(ref), spec.mode)
        for ref in spec.patterns
    ]
    grid = spec.grid_points(g.vertex_count)
    k = spec.replications
    logger.info(
        "Simulating %d patterns on %d vertices, grid %s, %d replications",
        len(specs),
        g.vertex_count,
        grid,
        k,
    )

    summaries = precompute(g, specs, spec.estimators, spec.design, workers)
    truths = true_counts(g, specs, summaries, spec.truth, spec.budget)
    logger.info("True counts: %s", truths)

    seeds = np.random.SeedSequence(spec.seed).spawn(len(grid) * k)
    tasks = [
        (gi, n_prime, seeds[gi * k + r]) for gi, n_prime in enumerate(grid) for r in range(k)
    ]
    context = _Context(g, tuple(specs), spec.design, tuple(spec.estimators), summaries)
    if progress is not None:
        progress.update(len(tasks), 0)
    results = map_ordered(
        _replicate,
        tasks,
        workers,
        initializer=_init_context,
        initargs=(context,),
        on_result=progress.advance if progress is not None else None,
    )
    return _rows(spec, specs, grid, truths, results)


def _with_mode(pattern_spec: PatternSpec, mode: NeighborhoodMode) -> PatternSpec:
    if pattern_spec.mode is mode:
        return pattern_spec
    return PatternSpec.build(pattern_spec.pattern, mode, pattern_spec.composition)


def _rows(
    spec: SimulationSpec,
    specs: Sequence[PatternSpec],
    grid: Sequence[int],
    truths: Sequence[float],
    results: Sequence[Replication],
) -> list[ReportRow]:
    k = spec.replications
    design = spec.design.label
    rows = []
    for ei, estimator in enumerate(spec.estimators):
        for gi, n_prime in enumerate(grid):
            block = results[gi * k : (gi + 1) * k]
            estimates = np.array([r.estimates[ei] for r in block])
            common = dict(
                estimator=estimator.value,
                design=design,
                grid_point=n_prime,
                node_coverage=float(np.mean([r.node_coverage for r in block])),
                edge_coverage=float(np.mean([r.edge_coverage for r in block])),
            )
            for pi, pattern_spec in enumerate(specs):
                column = estimates[:, pi]
                truth = truths[pi]
                try:
                    metric, value = "nrmse", nrmse(column, truth)
                except UndefinedMetric:
                    metric, value = "rmse", rmse(column, truth)
                rows.append(
                    ReportRow(
                        pattern=pattern_spec.pattern.label,
                        metric=metric,
                        value=value,
                        mean_estimate=float(np.mean(column)),
                        truth=truth,
                        **common,
                    )
                )
            if sum(abs(t) for t in truths) > 0:
                per_rep = nmae_per_replication(estimates, truths)
                for metric, value in (
                    ("nmae_median", float(np.median(per_rep))),
                    ("nmae_mean", float(np.mean(per_rep))),
                ):
                    rows.append(
                        ReportRow(
                            pattern="all",
                            metric=metric,
                            value=value,
                            truth=float(sum(truths)),
                            **common,
                        )
                    )
    return rows

