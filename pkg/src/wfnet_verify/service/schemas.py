"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

NetFormat = Literal["wfn", "pnml"]
PropertyName = Literal["termination", "proper", "no_dead"]


class NetSource(BaseModel):
    source: str = Field(..., description="Net definition text (.wfn DSL or PNML XML)")
    format: NetFormat = "wfn"


class ValidateRequest(NetSource):
    pass


class ViolationModel(BaseModel):
    condition: int
    detail: str


class ValidateResponse(BaseModel):
    valid: bool
    violations: list[ViolationModel]
    source: Optional[str] = None
    sink: Optional[str] = None
    warnings: list[str] = []


class CheckRequest(NetSource):
    k: int = Field(1, ge=1)
    cap: int = Field(1_000_000, ge=1)


class ConditionModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    pass_: Optional[bool] = Field(None, alias="pass")
    counterexample: Optional[list[str]] = None


class NoDeadModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    pass_: Optional[bool] = Field(None, alias="pass")
    dead: list[str] = []


class ConditionsModel(BaseModel):
    termination: ConditionModel
    proper: ConditionModel
    no_dead: NoDeadModel


class StatsModel(BaseModel):
    nodes: int
    edges: int
    millis: float


class ParametersModel(BaseModel):
    k: int
    resources: Optional[dict[str, int]] = None


class WitnessModel(BaseModel):
    ancestor: list[int]
    descendant: list[int]


class CheckResponse(BaseModel):
    result: Literal["sound", "weak_sound", "unsound", "unbounded", "inconclusive"]
    conditions: ConditionsModel
    stats: StatsModel
    parameters: ParametersModel
    witness: Optional[WitnessModel] = None
    cap: Optional[int] = None


class EmitRequest(NetSource):
    k: int = Field(1, ge=1)
    closure: bool = False
    weighted: bool = False
    properties: list[PropertyName] = ["termination", "proper"]


class EmitResponse(BaseModel):
    model: str
    place_index_map: dict[str, int]
    transition_index_map: dict[str, int]
    property_names: list[str]


class SpinCheckRequest(NetSource):
    k: int = Field(1, ge=1)
    cap: int = Field(1_000_000, ge=1)
    property: PropertyName = "proper"
    spin_path: Optional[str] = None


class SpinSideModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    pass_: bool = Field(..., alias="pass")
    errors: Optional[int] = None


class SpinCheckResponse(BaseModel):
    property: PropertyName
    ltl: str
    builtin: SpinSideModel
    spin: SpinSideModel
    agreement: bool
    caveat: Optional[str] = None
