"""Repeated-sampling accuracy checks. Each runs thousands of replications from
fixed seeds, so all of them are marked slow."""

import functools

import numpy as np
import pytest

from egocount.catalog import get_pattern
from egocount.counting import EgonetCount, exact_count, role_degrees, unique_copies
from egocount.estimation import (
    Estimator,
    VarianceMethod,
    copy_inclusion_prob,
    estimate_from_counts,
    estimate_role_occupancy,
    estimate_unique_counting,
)
from egocount.evaluation.generators import erdos_renyi, heterogeneous
from egocount.evaluation.simulation import GraphSource, SimulationSpec, run_simulation
from egocount.graph import Graph, extract_egonet
from egocount.pattern import PatternSpec
from egocount.sampling import RandomWalkDesign, SampleDesign, UISDesign, WISDesign, sample_egos

UIS_WR = UISDesign(replace=True)
UIS_WOR = UISDesign(replace=False)
WIS_WR = WISDesign(replace=True)


def spec_of(name) -> PatternSpec:
    return PatternSpec.build(get_pattern(name))


@functools.cache
def population(index: int) -> Graph:
    """Three graphs of about 100 vertices, the last one with heavy-tailed degrees."""
    match index:
        case 0:
            return erdos_renyi(100, 0.08, seed=1)
        case 1:
            return erdos_renyi(100, 0.12, seed=2)
    return heterogeneous(100, 3, seed=3)


def degree_sums(g: Graph, spec: PatternSpec) -> np.ndarray:
    return np.array(
        [sum(role_degrees(extract_egonet(g, v, spec.mode), spec)) for v in range(g.vertex_count)],
        dtype=float,
    )


def within(estimates: list[float], truth: float, errors: float) -> bool:
    values = np.asarray(estimates)
    stderr = values.std(ddof=1) / np.sqrt(len(values))
    return abs(values.mean() - truth) <= errors * stderr


@pytest.mark.slow
class TestUnbiased:
    """Mean of 10,000 estimates within 3 standard errors of the truth."""

    replications = 10_000

    @pytest.mark.parametrize("index", [0, 1, 2])
    @pytest.mark.parametrize("design", [UIS_WR, UIS_WOR, WIS_WR], ids=lambda d: d.label)
    def test_role_occupancy(self, index, design: SampleDesign):
        g = population(index)
        specs = [spec_of("triangle"), spec_of("clique-3")]
        sums = [degree_sums(g, spec) for spec in specs]
        estimates: list[list[float]] = [[] for _ in specs]
        for seed in np.random.SeedSequence(1000 + index).spawn(self.replications):
            sample = sample_egos(g, design, 15, seed)
            for i, spec in enumerate(specs):
                report = estimate_role_occupancy(
                    [(sums[i][v],) for v in sample.unique_egos],
                    sample.inclusion,
                    spec.multiplicity_sum,
                )
                estimates[i].append(report.estimate)
        for spec, values in zip(specs, estimates):
            assert within(values, exact_count(g, spec), 3), spec.identity

    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_unique_counting(self, index):
        g = population(index)
        spec = spec_of("triangle")
        copies = [
            unique_copies(extract_egonet(g, v, spec.mode), spec) for v in range(g.vertex_count)
        ]
        estimates = []
        for seed in np.random.SeedSequence(2000 + index).spawn(self.replications):
            sample = sample_egos(g, UIS_WR, 15, seed)
            seen = set().union(*(copies[v] for v in sample.unique_egos))
            pis = [copy_inclusion_prob(sample, key) for key in seen]
            estimates.append(estimate_unique_counting(pis, spec.multiplicity_sum).estimate)
        assert within(estimates, exact_count(g, spec), 3)


@pytest.mark.slow
class TestVarianceCalibration:
    """Mean variance estimate against the spread of 20,000 estimates."""

    replications = 20_000

    def spread(self, design: SampleDesign, method: VarianceMethod) -> tuple[float, float]:
        g = erdos_renyi(50, 0.15, seed=6)
        spec = spec_of("triangle")
        sums = degree_sums(g, spec)
        estimates, variances = [], []
        for seed in np.random.SeedSequence(3000).spawn(self.replications):
            sample = sample_egos(g, design, 10, seed)
            counts = [EgonetCount((int(sums[v]),), None) for v in sample.unique_egos]
            report = estimate_from_counts(counts, sample, spec, variance=method)
            estimates.append(report.estimate)
            variances.append(report.variance_estimate)
        return float(np.mean(variances)), float(np.var(estimates, ddof=1))

    def test_horvitz_thompson(self):
        mean_variance, empirical = self.spread(UIS_WOR, VarianceMethod.HorvitzThompson)
        assert mean_variance == pytest.approx(empirical, rel=0.10)

    def test_brewer_hanif_under_degree_weights(self):
        mean_variance, empirical = self.spread(WIS_WR, VarianceMethod.BrewerHanif)
        assert mean_variance >= 0.9 * empirical


def rows_by(rows, metric: str, estimator: str) -> dict[int, float]:
    return {r.grid_point: r.value for r in rows if r.metric == metric and r.estimator == estimator}


@pytest.mark.slow
class TestErrorDecay:

    def test_more_draws_less_error(self):
        spec = SimulationSpec(
            graph=GraphSource(generator="erdos_renyi", vertices=500, p=0.02, seed=5),
            patterns=["catalog:clique-2", "catalog:clique-3", "catalog:clique-4"],
            grid=[16, 32, 64, 128, 256],
            replications=1000,
            estimators=[Estimator.RoleOccupancy, Estimator.UniqueCounting],
        )
        rows = run_simulation(spec, workers=4)
        by_estimator = {
            estimator: rows_by(rows, "nmae_median", estimator) for estimator in ("ro", "uc")
        }
        for values in by_estimator.values():
            errors = [values[k] for k in spec.grid]
            for smaller, larger in zip(errors, errors[1:]):
                assert larger <= 1.5 * smaller
            assert errors[-1] < errors[0]
        assert by_estimator["uc"][256] <= by_estimator["ro"][256]


@pytest.mark.slow
class TestDesignEffect:
    """Degree-biased designs beat uniform sampling on a hub-dominated pattern."""

    def nrmse(self, design: SampleDesign) -> float:
        spec = SimulationSpec(
            graph=GraphSource(generator="heterogeneous", vertices=1000, m=2, seed=9),
            patterns=["catalog:star-4"],
            design=design,
            grid=[100],
            replications=200,
            truth="census",
            seed=11,
        )
        (row,) = [r for r in run_simulation(spec, workers=4) if r.metric == "nrmse"]
        return row.value

    def test_weighted_designs(self):
        uniform = self.nrmse(UIS_WOR)
        assert self.nrmse(WIS_WR) <= uniform
        assert self.nrmse(RandomWalkDesign(thinning=5)) <= uniform
