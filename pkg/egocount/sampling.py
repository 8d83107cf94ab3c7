"""Ego sampling designs and the node, copy and joint inclusion probabilities they
induce."""

from __future__ import annotations

import functools
import json
import logging
import math
import typing
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from egocount.errors import (
    DimensionMismatch,
    DisconnectedGraphError,
    InvalidProbability,
    SampleSizeError,
    UnsupportedDesign,
)

if typing.TYPE_CHECKING:
    from typing import Sequence

    import numpy.typing as npt

    from egocount.graph import Graph

logger = logging.getLogger(__name__)


class UISDesign(BaseModel):
    """Uniform independence sampling."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["uis"] = "uis"
    replace: bool = False

    @property
    def label(self) -> str:
        return "uis-wr" if self.replace else "uis-wor"

    @property
    def uniform(self) -> bool:
        return True


class WISDesign(BaseModel):
    """Weighted independence sampling, proportional to a known weight."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["wis"] = "wis"
    replace: bool = True
    weights: Literal["degree"] | list[float] = "degree"
    """Per-vertex weights in compact id order, or the (undirected) degree."""

    normalized: bool = False
    """The weights are the per-draw probabilities themselves and must sum to 1."""

    @property
    def label(self) -> str:
        return "wis-wr" if self.replace else "wis-wor"

    @property
    def uniform(self) -> bool:
        return False


class RandomWalkDesign(BaseModel):
    """Simple random walk on the undirected view, keeping every `thinning`-th
    step after `burn_in` steps."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["rw"] = "rw"
    thinning: int = Field(default=1, ge=1)
    burn_in: int | None = Field(default=None, ge=0)
    """Defaults to 10 x thinning."""

    start: int | None = None
    """Compact id of the first vertex; uniform over V when unset."""

    @property
    def label(self) -> str:
        return "rw"

    @property
    def uniform(self) -> bool:
        return False

    @property
    def burn_in_steps(self) -> int:
        return self.burn_in if self.burn_in is not None else 10 * self.thinning


SampleDesign = Annotated[
    UISDesign | WISDesign | RandomWalkDesign, Field(discriminator="kind")
]


def parse_design(label: str, thinning: int = 1, burn_in: int | None = None) -> SampleDesign:
    """Design from its short name: uis-wr, uis-wor, wis-wr, wis-wor or rw."""
    match label.strip().lower():
        case "uis-wr":
            return UISDesign(replace=True)
        case "uis-wor" | "uis":
            return UISDesign(replace=False)
        case "wis-wr" | "wis":
            return WISDesign(replace=True)
        case "wis-wor":
            return WISDesign(replace=False)
        case "rw":
            return RandomWalkDesign(thinning=thinning, burn_in=burn_in)
    raise ValueError(f"Unknown sampling design: {label!r}")


class EgoSample(BaseModel):
    """A drawn sample. Per-ego lists are aligned with `unique_egos`, which is sorted
    ascending."""

    design: SampleDesign
    population_size: int = Field(ge=1)
    n_prime: int = Field(ge=1)
    seed: int | None = None
    draws: list[int]
    unique_egos: list[int]
    inclusion: list[float]
    """Total inclusion probability p_i of each unique ego."""

    per_draw: list[float] | None = None
    """Per-draw probability p'_i of each unique ego (with-replacement designs)."""

    weights: list[float] | None = None
    """Weight w_i of each unique ego (non-uniform designs)."""

    per_draw_scale: float | None = None
    """p'_v = min(1, w_v * per_draw_scale) for any vertex v (non-uniform designs)."""

    @property
    def n(self) -> int:
        return len(self.unique_egos)

    @property
    def is_census(self) -> bool:
        return all(p >= 1.0 for p in self.inclusion) and self.n == self.population_size

    def per_draw_probability(self, weight: float | None = None) -> float:
        """p' of any vertex, given its weight for non-uniform designs."""
        if self.design.uniform:
            return 1.0 / self.population_size
        if weight is None or self.per_draw_scale is None:
            raise UnsupportedDesign(
                f"Per-draw probabilities under {self.design.label} need vertex weights"
            )
        if weight <= 0:
            raise InvalidProbability(f"Vertex weight must be positive, got {weight}")
        return min(1.0, weight * self.per_draw_scale)


def vertex_weights(g: Graph, design: SampleDesign) -> npt.NDArray[np.float64]:
    """Sampling weight of every vertex of `g` under a non-uniform design."""
    if isinstance(design, WISDesign) and design.weights != "degree":
        weights = np.asarray(design.weights, dtype=np.float64)
        if weights.shape != (g.vertex_count,):
            raise DimensionMismatch(
                f"Got {weights.size} weights for a graph of {g.vertex_count} vertices"
            )
        return weights
    return np.array(
        [len(adj) for adj in g.neighbor_lists], dtype=np.float64
    )


def _require_probability(p: float, what: str) -> float:
    if not 0.0 < p <= 1.0 or math.isnan(p):
        raise InvalidProbability(f"{what} must lie in (0, 1], got {p}")
    return p


def inclusion_after_draws(
    per_draw: float | npt.ArrayLike, n_prime: int
) -> npt.NDArray[np.float64]:
    """1 - (1 - p')^n', computed through log1p/expm1 so that tiny p' keep their
    precision. Works elementwise on arrays."""
    p = np.clip(np.asarray(per_draw, dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return -np.expm1(n_prime * np.log1p(-p))


def node_inclusion_prob(
    design: SampleDesign,
    population_size: int,
    n_prime: int,
    per_draw: float | None = None,
) -> float:
    """Probability that a given vertex appears at least once among n' draws."""
    N = population_size
    if isinstance(design, UISDesign):
        if design.replace:
            return float(inclusion_after_draws(1.0 / N, n_prime))
        if n_prime > N:
            raise SampleSizeError(f"Cannot draw {n_prime} of {N} vertices without replacement")
        return n_prime / N
    if isinstance(design, WISDesign) and not design.replace:
        raise UnsupportedDesign(
            "Inclusion probabilities of weighted sampling without replacement are not available"
        )
    if per_draw is None:
        raise InvalidProbability(f"{design.label} needs the per-draw probability")
    if not 0.0 < per_draw < 1.0 or math.isnan(per_draw):
        raise InvalidProbability(f"Per-draw probability must lie in (0, 1), got {per_draw}")
    return float(inclusion_after_draws(per_draw, n_prime))


def hansen_hurwitz_scale(draw_weights: npt.ArrayLike, population_size: int) -> float:
    """sum_k(1 / w'_k) / (n' N), the sum running over every draw including
    repeats."""
    draws = np.asarray(draw_weights, dtype=np.float64)
    if draws.size == 0:
        raise SampleSizeError("No draws to estimate per-draw probabilities from")
    if np.any(draws <= 0):
        raise InvalidProbability("Hansen-Hurwitz weights must be positive")
    return float(np.sum(1.0 / draws)) / (draws.size * population_size)


def hansen_hurwitz_per_draw(
    draw_weights: npt.ArrayLike, weight: float | npt.ArrayLike, population_size: int
) -> float | npt.NDArray[np.float64]:
    """p'_j ~ w_j * scale, clamped to 1. Returns an array when `weight` is one."""
    weights = np.asarray(weight, dtype=np.float64)
    if np.any(weights <= 0):
        raise InvalidProbability("Hansen-Hurwitz weights must be positive")
    per_draw = np.minimum(1.0, weights * hansen_hurwitz_scale(draw_weights, population_size))
    return float(per_draw) if per_draw.ndim == 0 else per_draw


def hansen_hurwitz_inclusion(
    draw_weights: npt.ArrayLike,
    weight: float | npt.ArrayLike,
    n_prime: int,
    population_size: int,
) -> float | npt.NDArray[np.float64]:
    per_draw = hansen_hurwitz_per_draw(draw_weights, weight, population_size)
    inclusion = inclusion_after_draws(per_draw, n_prime)
    return float(inclusion) if inclusion.ndim == 0 else inclusion


def subgraph_inclusion_prob(
    design: SampleDesign,
    population_size: int,
    n_prime: int,
    multiplicity_sum: int,
    member_per_draw: Sequence[float] | None = None,
) -> float:
    """Probability that at least one observable-role occupant of a copy is drawn.

    Uniform designs only need the number of occupants (sum of m_j). Non-uniform
    with-replacement designs need the per-draw probability of each occupant.
    """
    N = population_size
    if multiplicity_sum < 1 or multiplicity_sum > N:
        raise SampleSizeError(f"Multiplicity sum {multiplicity_sum} outside 1..{N}")

    if isinstance(design, UISDesign):
        if design.replace:
            return float(inclusion_after_draws(multiplicity_sum / N, n_prime))
        if n_prime > N:
            raise SampleSizeError(f"Cannot draw {n_prime} of {N} vertices without replacement")
        return 1.0 - _missed_without_replacement(N, n_prime, multiplicity_sum)

    if isinstance(design, WISDesign) and not design.replace:
        raise UnsupportedDesign(
            "Copy inclusion probabilities of weighted sampling without replacement are not available"
        )
    if member_per_draw is None or len(member_per_draw) != multiplicity_sum:
        raise DimensionMismatch(
            f"{design.label} needs one per-draw probability per observable-role occupant"
        )
    for p in member_per_draw:
        _require_probability(p, "Per-draw probability")
    total = math.fsum(member_per_draw)
    if total > 1.0 + 1e-12:
        raise InvalidProbability(
            f"Per-draw probabilities of the copy's occupants sum to {total:.6g} > 1"
        )
    return float(inclusion_after_draws(total, n_prime))


@functools.cache
def _missed_without_replacement(N: int, n_prime: int, multiplicity_sum: int) -> float:
    """Probability that none of `multiplicity_sum` given vertices is among n'
    draws without replacement."""
    missed = 1.0
    for k in range(n_prime):
        numerator = N - multiplicity_sum - k
        if numerator <= 0:
            return 0.0
        missed *= numerator / (N - k)
    return missed


def joint_inclusion_matrix(sample: EgoSample) -> npt.NDArray[np.float64]:
    """p_jk for every pair of unique egos; the diagonal holds p_j."""
    design = sample.design
    N, n_prime, n = sample.population_size, sample.n_prime, sample.n
    if isinstance(design, UISDesign) and not design.replace:
        pair = n_prime * (n_prime - 1) / (N * (N - 1)) if N > 1 else 1.0
        joint = np.full((n, n), pair)
    elif isinstance(design, UISDesign) or (isinstance(design, WISDesign) and design.replace):
        if isinstance(design, UISDesign):
            p = np.full(n, 1.0 / N)
        else:
            assert sample.per_draw is not None
            p = np.asarray(sample.per_draw, dtype=np.float64)
        joint = _joint_with_replacement(p, n_prime)
    else:
        raise UnsupportedDesign(
            f"Joint inclusion probabilities are not available under {design.label}"
        )
    np.fill_diagonal(joint, sample.inclusion)
    return joint


def _joint_with_replacement(
    per_draw: npt.NDArray[np.float64], n_prime: int
) -> npt.NDArray[np.float64]:
    """1 - (1-a)^n' - (1-b)^n' + (1-a-b)^n', rewritten as
    p_a p_b - [(1-a)^n' (1-b)^n' - (1-a-b)^n'] so that no term cancels when
    a and b are tiny."""
    single = inclusion_after_draws(per_draw, n_prime)
    a, b = per_draw[:, None], per_draw[None, :]
    rest = 1.0 - a - b
    with np.errstate(divide="ignore", invalid="ignore"):
        # (1-a)(1-b) = (1-a-b)(1 + ab / (1-a-b))
        gap = np.where(
            rest > 0,
            np.exp(n_prime * np.log1p(-(a + b))) * np.expm1(n_prime * np.log1p(a * b / rest)),
            np.exp(n_prime * np.log1p(-a)) * np.exp(n_prime * np.log1p(-b)),
        )
    return np.clip(single[:, None] * single[None, :] - gap, 0.0, 1.0)


def _random_walk(
    g: Graph, design: RandomWalkDesign, n_prime: int, rng: np.random.Generator
) -> list[int]:
    if not g.connected:
        raise DisconnectedGraphError(
            "Random walk sampling needs a connected graph; use the largest component"
        )
    neighbors = g.neighbor_lists
    if design.start is None:
        current = int(rng.integers(g.vertex_count))
    else:
        current = design.start
        if not 0 <= current < g.vertex_count:
            raise SampleSizeError(f"Random walk start {current} is not a vertex")

    def step(v: int) -> int:
        adj = neighbors[v]
        return adj[int(rng.integers(len(adj)))]

    for _ in range(design.burn_in_steps):
        current = step(current)
    draws = []
    for _ in range(n_prime):
        for _ in range(design.thinning):
            current = step(current)
        draws.append(current)
    return draws


def sample_egos(
    g: Graph,
    design: SampleDesign,
    n_prime: int,
    seed: int | np.random.SeedSequence | None = None,
) -> EgoSample:
    """Draws n' egos (compact ids) from `g` and attaches inclusion probabilities."""
    N = g.vertex_count
    if n_prime < 1:
        raise SampleSizeError(f"Sample size must be at least 1, got {n_prime}")
    rng = np.random.default_rng(seed)

    weights = None
    probabilities = None
    if not design.uniform:
        weights = vertex_weights(g, design)
        if np.any(weights <= 0):
            raise InvalidProbability(
                "Every vertex needs a positive sampling weight (isolated vertex under degree weights?)"
            )
        total = float(np.sum(weights))
        if isinstance(design, WISDesign) and design.normalized and abs(total - 1.0) > 1e-9:
            raise InvalidProbability(f"Per-draw probabilities sum to {total}, not 1")
        probabilities = weights / total

    match design:
        case UISDesign(replace=True):
            draws = rng.integers(0, N, size=n_prime).tolist()
        case UISDesign():
            if n_prime > N:
                raise SampleSizeError(f"Cannot draw {n_prime} of {N} vertices without replacement")
            draws = rng.choice(N, size=n_prime, replace=False).tolist()
        case WISDesign(replace=True):
            draws = rng.choice(N, size=n_prime, replace=True, p=probabilities).tolist()
        case WISDesign():
            raise UnsupportedDesign(
                "Inclusion probabilities of weighted sampling without replacement are not available"
            )
        case RandomWalkDesign():
            draws = _random_walk(g, design, n_prime, rng)

    unique = sorted(set(draws))
    per_draw = None
    unique_weights = None
    scale = None
    if weights is None:
        inclusion = [node_inclusion_prob(design, N, n_prime)] * len(unique)
    else:
        if isinstance(design, RandomWalkDesign):
            scale = hansen_hurwitz_scale(weights[draws], N)
        else:
            scale = 1.0 / float(np.sum(weights))
        chosen = weights[unique]
        unique_weights = chosen.tolist()
        per_draw_array = np.minimum(1.0, chosen * scale)
        per_draw = per_draw_array.tolist()
        inclusion = inclusion_after_draws(per_draw_array, n_prime).tolist()

    logger.debug("Drew %d egos (%d unique) under %s", n_prime, len(unique), design.label)
    return EgoSample(
        design=design,
        population_size=N,
        n_prime=n_prime,
        seed=seed if isinstance(seed, int) else None,
        draws=[int(v) for v in draws],
        unique_egos=unique,
        inclusion=inclusion,
        per_draw=per_draw,
        weights=unique_weights,
        per_draw_scale=scale,
    )


def save_sample(sample: EgoSample, path: str | Path) -> None:
    with open(path, "w") as f:
        f.write(sample.model_dump_json(indent=2))


def load_sample(path: str | Path) -> EgoSample:
    with open(path, "r") as f:
        return EgoSample.model_validate(json.load(f))
