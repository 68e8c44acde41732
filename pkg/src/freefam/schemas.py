"""Pydantic models for the JSON each CLI subcommand prints."""

from typing import Any

from pydantic import BaseModel, RootModel

from .cumulants import CheckName, CheckScope


class SequenceOutput(RootModel[list[float]]):
    """A bare sequence: cumulants c_1..c_N, moments m_1..m_N or Taylor coefficients of V."""


class FormalSequenceOutput(BaseModel):
    cumulants: list[float]
    formal: bool


class VarianceModel(BaseModel):
    num: list[float]
    den: list[float]
    m0: float


class CheckModel(BaseModel):
    name: CheckName
    scope: CheckScope
    passed: bool
    witness: dict[str, Any]


class CheckOutput(BaseModel):
    variance: VarianceModel
    standardized: VarianceModel
    order: int
    overall: bool
    infinitely_divisible: bool
    checks: list[CheckModel]


class AtomModel(BaseModel):
    location: float
    mass: float


class AtomsOutput(RootModel[list[AtomModel]]):
    pass


class DensityRow(BaseModel):
    x: float
    density: float


class FamilyOutput(BaseModel):
    description: str
    mass: float
    mean: float
    variance: float
    atoms: list[AtomModel]
    density: list[DensityRow]


class ConvergenceOutput(BaseModel):
    grid: list[float]
    distances: list[float]
    slope: float | None


OUTPUT_SCHEMAS: dict[str, type[BaseModel]] = {
    "cumulants": SequenceOutput,
    "variance": SequenceOutput,
    "moments": SequenceOutput,
    "check": CheckOutput,
    "meixner": AtomsOutput,
    "family": FamilyOutput,
    "power": FormalSequenceOutput,
    "convolve": SequenceOutput,
    "clt": SequenceOutput,
    "mp-approx": ConvergenceOutput,
    "mora": ConvergenceOutput,
}


def output_schema(command: str) -> dict[str, Any]:
    """JSON Schema of a subcommand's JSON output."""
    try:
        model = OUTPUT_SCHEMAS[command]
    except KeyError:
        known = ", ".join(sorted(OUTPUT_SCHEMAS))
        raise ValueError(f"no schema for {command!r} (known: {known})") from None
    return model.model_json_schema()
