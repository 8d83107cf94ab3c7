"""Egonet replay files: sampled egonets stored with their inclusion data, so that
estimation can run later without access to the population graph.

Records keep the ego first (local index 0). Anonymized records carry no alter ids
and can only be used with role occupancy estimation.
"""

from __future__ import annotations

import logging
import typing
from pathlib import Path
from typing import Self

from pydantic import BaseModel, ConfigDict, model_validator

from egocount.errors import SampleSizeError, UnsupportedDesign
from egocount.graph import Egonet, NeighborhoodMode, open_text
from egocount.sampling import EgoSample, SampleDesign, node_inclusion_prob

if typing.TYPE_CHECKING:
    from typing import Sequence

logger = logging.getLogger(__name__)

REPLAY_SCHEMA_VERSION = 1


class ReplayHeader(BaseModel):
    model_config = ConfigDict(extra="forbid")

    design: SampleDesign
    mode: NeighborhoodMode
    n_prime: int
    population_size: int | None = None
    seed: int | None = None
    per_draw_scale: float | None = None


class EgonetRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ego: int
    alters: list[int] | None = None
    """Original ids of the alters, or None when anonymized."""

    edges: list[tuple[int, int]]
    """Edges in local indices; the ego is 0 and alter k is k + 1."""

    states: list[int]
    inclusion: float | None = None
    per_draw: float | None = None
    weight: float | None = None

    @model_validator(mode="after")
    def _check_sizes(self) -> Self:
        size = len(self.states)
        if size < 1:
            raise ValueError(f"Record of ego {self.ego} has no states")
        if self.alters is not None and len(self.alters) + 1 != size:
            raise ValueError(
                f"Record of ego {self.ego}: {len(self.alters)} alters but {size} states"
            )
        if any(s < 1 for s in self.states):
            raise ValueError(f"Record of ego {self.ego} has a state below 1")
        for i, j in self.edges:
            if not (0 <= i < size and 0 <= j < size) or i == j:
                raise ValueError(f"Record of ego {self.ego} has invalid edge ({i}, {j})")
        return self

    @property
    def labeled(self) -> bool:
        return self.alters is not None

    def to_egonet(self, mode: NeighborhoodMode) -> Egonet:
        labels = (self.ego, *self.alters) if self.alters is not None else None
        if mode.directed:
            edges = sorted(set(self.edges))
        else:
            edges = sorted({(min(i, j), max(i, j)) for i, j in self.edges})
        return Egonet(
            ego=self.ego,
            members=labels if labels is not None else tuple(range(len(self.states))),
            edges=tuple(edges),
            states=tuple(self.states),
            mode=mode,
            labels=labels,
        )


class ReplayFile(BaseModel):
    schema_version: int = REPLAY_SCHEMA_VERSION
    header: ReplayHeader
    records: list[EgonetRecord]

    @model_validator(mode="after")
    def _check_unique_egos(self) -> Self:
        egos = [r.ego for r in self.records]
        if len(set(egos)) != len(egos):
            raise ValueError("Replay file lists an ego more than once")
        return self

    @property
    def labeled(self) -> bool:
        return all(r.labeled for r in self.records)

    def egonets(self) -> list[Egonet]:
        return [r.to_egonet(self.header.mode) for r in self.records]

    def to_sample(self, population_size: int | None = None) -> EgoSample:
        """The sample the records came from. `population_size` overrides the header."""
        header = self.header
        N = population_size if population_size is not None else header.population_size
        if N is None:
            raise SampleSizeError(
                "Replay file has no population size; give it explicitly (--pop-size)"
            )
        inclusion = [self._inclusion(r, N) for r in self.records]
        per_draw = [r.per_draw for r in self.records]
        weights = [r.weight for r in self.records]
        egos = [r.ego for r in self.records]
        return EgoSample(
            design=header.design,
            population_size=N,
            n_prime=header.n_prime,
            seed=header.seed,
            draws=egos,
            unique_egos=egos,
            inclusion=inclusion,
            per_draw=None if None in per_draw else typing.cast("list[float]", per_draw),
            weights=None if None in weights else typing.cast("list[float]", weights),
            per_draw_scale=header.per_draw_scale,
        )

    def _inclusion(self, record: EgonetRecord, population_size: int) -> float:
        design, n_prime = self.header.design, self.header.n_prime
        if design.uniform:
            return node_inclusion_prob(design, population_size, n_prime)
        if record.inclusion is not None:
            return record.inclusion
        if record.per_draw is not None:
            return node_inclusion_prob(design, population_size, n_prime, record.per_draw)
        raise UnsupportedDesign(
            f"Record of ego {record.ego} has no inclusion data for {design.label} sampling"
        )


def replay_from_sample(
    sample: EgoSample,
    egonets: Sequence[Egonet],
    anonymize: bool = False,
) -> ReplayFile:
    """Replay records for the egonets of `sample`, aligned with its unique egos."""
    mode = egonets[0].mode if egonets else NeighborhoodMode.UndirectedFull
    records = []
    for i, e in enumerate(egonets):
        labels = e.labels if e.labels is not None else e.members
        records.append(
            EgonetRecord(
                ego=labels[0],
                alters=None if anonymize or e.labels is None else list(labels[1:]),
                edges=list(e.edges),
                states=list(e.states),
                inclusion=sample.inclusion[i],
                per_draw=sample.per_draw[i] if sample.per_draw is not None else None,
                weight=sample.weights[i] if sample.weights is not None else None,
            )
        )
    header = ReplayHeader(
        design=sample.design,
        mode=mode,
        n_prime=sample.n_prime,
        population_size=sample.population_size,
        seed=sample.seed,
        per_draw_scale=sample.per_draw_scale,
    )
    return ReplayFile(header=header, records=records)


def write_replay(replay: ReplayFile, path: str | Path) -> None:
    with open_text(path, "w") as f:
        f.write(replay.model_dump_json(indent=1))
        f.write("\n")
    logger.info("Wrote %d egonet records to %s", len(replay.records), path)


def read_replay(path: str | Path) -> ReplayFile:
    with open_text(path) as f:
        return ReplayFile.model_validate_json(f.read())
