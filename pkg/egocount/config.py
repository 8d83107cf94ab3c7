from __future__ import annotations

import typing
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from egocount.estimation import Estimator, VarianceMethod
from egocount.graph import NeighborhoodMode
from egocount.parallel import default_workers
from egocount.sampling import RandomWalkDesign, SampleDesign, UISDesign, WISDesign, parse_design

if typing.TYPE_CHECKING:
    from pathlib import Path

M = typing.TypeVar("M", bound=BaseModel)

OutputFormat = Literal["json", "csv"]

_design_adapter: TypeAdapter[SampleDesign] = TypeAdapter(SampleDesign)


class RunConfig(BaseModel):
    """Settings of one `estimate` run. Loaded from a YAML file and/or flags."""

    model_config = ConfigDict(extra="forbid")

    graph: str | None = None
    attrs: str | None = None
    directed: bool = False
    largest_component: bool = False
    pattern: str | None = None
    mode: NeighborhoodMode | None = None
    design: str | UISDesign | WISDesign | RandomWalkDesign = "uis-wor"
    """A short name (uis-wr, uis-wor, wis-wr, wis-wor, rw) or a full design
    mapping such as `{kind: wis, weights: [...]}`."""

    thinning: int = Field(default=1, ge=1)
    burn_in: int | None = Field(default=None, ge=0)
    n: int | None = Field(default=None, ge=1)
    """Number of draws n'."""

    seed: int | None = None
    estimator: Estimator = Estimator.RoleOccupancy
    variance: VarianceMethod = VarianceMethod.Auto
    pop_size: int | None = Field(default=None, ge=1)
    """Population size N, for replayed samples from a graph that is not at hand."""

    replay: str | None = None
    save_replay: str | None = None
    anonymize: bool = False
    out: str | None = None
    format: OutputFormat = "json"
    workers: int = Field(default_factory=default_workers, ge=1)

    @field_validator("mode", mode="before")
    @classmethod
    def _parse_mode(cls, value: object) -> object:
        if isinstance(value, str):
            return NeighborhoodMode.parse(value)
        return value

    @field_validator("design", mode="before")
    @classmethod
    def _parse_design(cls, value: object) -> object:
        if isinstance(value, dict):
            return _design_adapter.validate_python(value)
        return value

    def sample_design(self) -> SampleDesign:
        """The sampling design. `thinning` and `burn_in` only apply to the short
        name `rw`."""
        if isinstance(self.design, str):
            return parse_design(self.design, self.thinning, self.burn_in)
        return self.design


def read_config(file: str | Path, model: type[M]) -> M:
    """Reads a YAML (or JSON) mapping into `model`. Dashes in keys become
    underscores so that files may use the flag spelling."""
    with open(file, "r") as f:

        config = yaml.safe_load(f) or {}

    if isinstance(config, dict):
        config = {str(key).replace("-", "_"): value for key, value in config.items()}

    return model.model_validate(config)
