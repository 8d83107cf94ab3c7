"""Subgraph count estimators: role occupancy (works on unlabeled egonets) and
unique counting (needs labels), with Horvitz-Thompson and Brewer-Hanif variance
estimates."""

from __future__ import annotations

import logging
import math
import time
import typing
from collections.abc import Mapping
from dataclasses import dataclass
from datetime import UTC, datetime
from enum import Enum

import numpy as np
from pydantic import BaseModel, computed_field

from egocount.counting import count_egonet
from egocount.errors import (
    DimensionMismatch,
    EmptyObservableSet,
    InvalidProbability,
    SampleSizeError,
    UnlabeledSample,
    UnsupportedDesign,
)
from egocount.graph import extract_egonet
from egocount.parallel import map_ordered
from egocount.sampling import (
    UISDesign,
    WISDesign,
    joint_inclusion_matrix,
    sample_egos,
    subgraph_inclusion_prob,
    vertex_weights,
)

if typing.TYPE_CHECKING:
    from typing import Callable, Sequence

    import numpy.typing as npt

    from egocount.counting import CopyKey, EgonetCount, RoleDegreeVector
    from egocount.graph import Egonet, Graph
    from egocount.pattern import PatternSpec
    from egocount.sampling import EgoSample, SampleDesign

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


class Estimator(str, Enum):
    RoleOccupancy = "ro"
    UniqueCounting = "uc"


class VarianceMethod(str, Enum):
    HorvitzThompson = "ht"
    BrewerHanif = "bh"
    Skip = "none"
    Auto = "auto"
    """Horvitz-Thompson when joint inclusion probabilities exist, else Brewer-Hanif."""


class EstimateReport(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    estimator: Estimator
    estimate: float
    variance_estimate: float | None = None
    variance_method: VarianceMethod = VarianceMethod.Skip
    variance_truncated: bool = False
    """The Horvitz-Thompson variance came out negative and was set to 0."""

    n: int
    n_prime: int
    population_size: int
    design: str = ""
    pattern: str = ""
    multiplicity_sum: int
    observed_copies: int | None = None
    seed: int | None = None
    elapsed_seconds: float | None = None
    created_at: str | None = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def standard_error(self) -> float | None:
        """Square root of the variance estimate."""
        if self.variance_estimate is None:
            return None
        return math.sqrt(self.variance_estimate)


@dataclass(frozen=True)
class Variance:
    value: float
    truncated: bool = False


def _probabilities(values: Sequence[float], what: str) -> npt.NDArray[np.float64]:
    p = np.asarray(values, dtype=np.float64)
    if np.any(~(p > 0.0)) or np.any(p > 1.0 + 1e-12):
        raise InvalidProbability(f"Every {what} must lie in (0, 1]")
    return p


def _check_multiplicity_sum(multiplicity_sum: int) -> None:
    if multiplicity_sum <= 0:
        raise EmptyObservableSet("The pattern has no observable role (sum of m_j is 0)")


def estimate_role_occupancy(
    degrees: Sequence[RoleDegreeVector],
    inclusion: Sequence[float],
    multiplicity_sum: int,
    n_prime: int | None = None,
    population_size: int | None = None,
) -> EstimateReport:
    """C_U ~ sum_i sum_j d_ij / p_i / sum_j m_j, summed in the order given."""
    _check_multiplicity_sum(multiplicity_sum)
    if len(degrees) != len(inclusion):
        raise DimensionMismatch(
            f"{len(degrees)} role degree vectors but {len(inclusion)} inclusion probabilities"
        )
    p = _probabilities(inclusion, "inclusion probability")
    sums = np.array([sum(d) for d in degrees], dtype=np.float64)
    total = float(np.sum(sums / p)) if len(sums) else 0.0
    n = len(degrees)
    return EstimateReport(
        estimator=Estimator.RoleOccupancy,
        estimate=total / multiplicity_sum,
        n=n,
        n_prime=n_prime if n_prime is not None else n,
        population_size=population_size if population_size is not None else n,
        multiplicity_sum=multiplicity_sum,
    )


def variance_ht(
    degree_sums: Sequence[float],
    inclusion: Sequence[float],
    joint: npt.ArrayLike,
    multiplicity_sum: int,
) -> Variance:
    """Unbiased Horvitz-Thompson variance of the role occupancy estimate:

        [sum_j (1/p_j^2 - 1/p_j) s_j^2 + sum_{j!=k} (1/(p_j p_k) - 1/p_jk) s_j s_k] / (sum m)^2
    """
    _check_multiplicity_sum(multiplicity_sum)
    p = _probabilities(inclusion, "inclusion probability")
    pjk = np.asarray(joint, dtype=np.float64)
    s = np.asarray(degree_sums, dtype=np.float64)
    if pjk.shape != (len(p), len(p)) or s.shape != p.shape:
        raise DimensionMismatch("Degree sums, inclusion and joint inclusion sizes differ")
    off_diagonal = ~np.eye(len(p), dtype=bool)
    if np.any(pjk[off_diagonal] <= 0):
        raise InvalidProbability("Joint inclusion probabilities must be positive")

    a = s / p
    first = float(np.sum((1.0 - p) * a * a))
    weights = np.where(off_diagonal, 1.0 - np.outer(p, p) / np.where(off_diagonal, pjk, 1.0), 0.0)
    second = float(a @ weights @ a)
    value = (first + second) / multiplicity_sum**2
    if value < 0:
        logger.info("Negative Horvitz-Thompson variance %.6g truncated to 0", value)
        return Variance(0.0, truncated=True)
    return Variance(value)


def variance_brewer_hanif(
    degree_sums: Sequence[float],
    weights: Sequence[float],
    population_size: int,
    multiplicity_sum: int,
    estimate: float,
) -> Variance:
    """Conservative variance that needs only weights proportional to inclusion:

        (N - n) / (n (n - 1) N) * sum_j (z_j - C)^2,
        z_j = N n s_j / (w_j sum m sum_k 1/w_k)

    Each z_j is a single-ego estimate of the total, so under uniform weights this
    is the usual without-replacement variance.
    """
    _check_multiplicity_sum(multiplicity_sum)
    s = np.asarray(degree_sums, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n = len(s)
    if n < 2:
        raise SampleSizeError("Brewer-Hanif variance needs at least two unique egos")
    if w.shape != s.shape:
        raise DimensionMismatch(f"{len(s)} degree sums but {len(w)} weights")
    if np.any(w <= 0):
        raise InvalidProbability("Brewer-Hanif weights must be positive")
    N = population_size
    z = N * n * s / (w * multiplicity_sum * float(np.sum(1.0 / w)))
    factor = max(N - n, 0) / (n * (n - 1) * N)
    return Variance(factor * float(np.sum((z - estimate) ** 2)))


def estimate_unique_counting(
    copy_inclusion: Mapping[CopyKey, float] | Sequence[float],
    multiplicity_sum: int,
    n: int = 0,
    n_prime: int = 0,
    population_size: int = 0,
) -> EstimateReport:
    """C_U ~ sum over the unique observed copies of 1 / pi_i."""
    if isinstance(copy_inclusion, Mapping):
        values = list(copy_inclusion.values())
    else:
        values = list(copy_inclusion)
    pi = _probabilities(values, "copy inclusion probability") if values else np.zeros(0)
    estimate = float(np.sum(1.0 / pi)) if len(pi) else 0.0
    return EstimateReport(
        estimator=Estimator.UniqueCounting,
        estimate=estimate,
        n=n,
        n_prime=n_prime,
        population_size=population_size,
        multiplicity_sum=multiplicity_sum,
        observed_copies=len(values),
    )


def copy_inclusion_prob(
    sample: EgoSample,
    key: CopyKey,
    weight_of: Callable[[int], float] | None = None,
) -> float:
    """pi_i of one copy: the chance that any of its observable-role occupants is
    drawn. Non-uniform designs need the weight of every occupant."""
    design = sample.design
    occupants = len(key.anchors)
    if design.uniform:
        return subgraph_inclusion_prob(
            design, sample.population_size, sample.n_prime, occupants
        )
    if weight_of is None:
        raise UnsupportedDesign(
            f"Unique counting under {design.label} needs the weights of unsampled alters"
        )
    per_draw = [sample.per_draw_probability(weight_of(label)) for label in key.anchors]
    return subgraph_inclusion_prob(
        design, sample.population_size, sample.n_prime, occupants, per_draw
    )


def resolve_variance_method(method: VarianceMethod, design: SampleDesign) -> VarianceMethod:
    if method is not VarianceMethod.Auto:
        return method
    has_joint = isinstance(design, UISDesign) or (
        isinstance(design, WISDesign) and design.replace
    )
    return VarianceMethod.HorvitzThompson if has_joint else VarianceMethod.BrewerHanif


_SPEC: PatternSpec | None = None
_WITH_COPIES = False


def _init_counter(spec: PatternSpec, with_copies: bool) -> None:
    global _SPEC, _WITH_COPIES
    _SPEC = spec
    _WITH_COPIES = with_copies


def _count_one(e: Egonet) -> EgonetCount:
    assert _SPEC is not None
    return count_egonet(e, _SPEC, with_copies=_WITH_COPIES)


def count_egonets(
    egonets: Sequence[Egonet], spec: PatternSpec, with_copies: bool, workers: int = 1
) -> list[EgonetCount]:
    return map_ordered(
        _count_one, egonets, workers, initializer=_init_counter, initargs=(spec, with_copies)
    )


def estimate_from_counts(
    counts: Sequence[EgonetCount],
    sample: EgoSample,
    spec: PatternSpec,
    estimator: Estimator = Estimator.RoleOccupancy,
    variance: VarianceMethod = VarianceMethod.Auto,
    weight_of: Callable[[int], float] | None = None,
) -> EstimateReport:
    """Combines per-ego counts (aligned with `sample.unique_egos`) into a report."""
    if len(counts) != sample.n:
        raise DimensionMismatch(f"{len(counts)} egonet counts for {sample.n} unique egos")
    msum = spec.multiplicity_sum
    meta = dict(
        n_prime=sample.n_prime,
        population_size=sample.population_size,
    )

    if estimator is Estimator.UniqueCounting:
        copies: set[CopyKey] = set()
        for count in counts:
            if count.copies is None:
                raise UnlabeledSample("Unique counting needs labeled egonets")
            copies |= count.copies
        inclusion = {
            key: copy_inclusion_prob(sample, key, weight_of) for key in sorted(copies)
        }
        report = estimate_unique_counting(inclusion, msum, n=sample.n, **meta)
    else:
        report = estimate_role_occupancy(
            [c.degrees for c in counts], sample.inclusion, msum, **meta
        )
        method = resolve_variance_method(variance, sample.design)
        sums = [float(sum(c.degrees)) for c in counts]
        result: Variance | None = None
        if method is VarianceMethod.HorvitzThompson:
            result = variance_ht(sums, sample.inclusion, joint_inclusion_matrix(sample), msum)
        elif method is VarianceMethod.BrewerHanif:
            if variance is VarianceMethod.Auto and sample.n < 2:
                logger.warning("Only one unique ego; no variance estimate")
                method = VarianceMethod.Skip
            elif sample.is_census:
                result = Variance(0.0)
            else:
                weights = sample.weights if sample.weights is not None else [1.0] * sample.n
                result = variance_brewer_hanif(
                    sums, weights, sample.population_size, msum, report.estimate
                )
        if result is not None:
            report = report.model_copy(
                update=dict(
                    variance_estimate=result.value,
                    variance_method=method,
                    variance_truncated=result.truncated,
                )
            )

    return report.model_copy(
        update=dict(design=sample.design.label, pattern=spec.identity, seed=sample.seed)
    )


def estimate_from_egonets(
    egonets: Sequence[Egonet],
    sample: EgoSample,
    spec: PatternSpec,
    estimator: Estimator = Estimator.RoleOccupancy,
    variance: VarianceMethod = VarianceMethod.Auto,
    workers: int = 1,
    weight_of: Callable[[int], float] | None = None,
) -> EstimateReport:
    """Counts every egonet (possibly in worker processes) and estimates C_U."""
    started = time.perf_counter()
    with_copies = estimator is Estimator.UniqueCounting
    if with_copies and not all(e.labeled for e in egonets):
        raise UnlabeledSample("Unique counting needs labeled egonets")
    counts = count_egonets(egonets, spec, with_copies, workers)
    report = estimate_from_counts(counts, sample, spec, estimator, variance, weight_of)
    return report.model_copy(
        update=dict(
            elapsed_seconds=round(time.perf_counter() - started, 6),
            created_at=datetime.now(UTC).isoformat(timespec="seconds"),
        )
    )


def graph_weight_lookup(g: Graph, design: SampleDesign) -> Callable[[int], float] | None:
    """Maps an original vertex id to its sampling weight, for non-uniform designs."""
    if design.uniform:
        return None
    weights = vertex_weights(g, design)
    return lambda label: float(weights[g.index_of(label)])


def estimate_from_graph(
    g: Graph,
    spec: PatternSpec,
    design: SampleDesign,
    n_prime: int,
    seed: int | None = None,
    estimator: Estimator = Estimator.RoleOccupancy,
    variance: VarianceMethod = VarianceMethod.Auto,
    workers: int = 1,
) -> tuple[EstimateReport, list[Egonet], EgoSample]:
    """Samples egos from `g`, extracts their egonets and estimates C_U."""
    sample = sample_egos(g, design, n_prime, seed)
    egonets = [extract_egonet(g, v, spec.mode) for v in sample.unique_egos]
    report = estimate_from_egonets(
        egonets,
        sample,
        spec,
        estimator,
        variance,
        workers,
        weight_of=graph_weight_lookup(g, design),
    )
    return report, egonets, sample

