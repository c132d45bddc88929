"""Pydantic report models; JSON output and the shipped schemas come from these."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ViolationModel(BaseModel):
    axiom: str
    vertex: Optional[str] = None
    arrows: List[str] = Field(default_factory=list)
    message: str


class ValidationReport(BaseModel):
    algebra: str
    ok: bool
    violations: List[ViolationModel] = Field(default_factory=list)
    nonzero_compositions: List[List[str]] = Field(default_factory=list)


class BandsReport(BaseModel):
    algebra: str
    bands: List[str]
    max_len: int
    truncated: bool
    domestic: bool
    n: Optional[int] = None


class DomesticReport(BaseModel):
    algebra: str
    domestic: bool
    n: Optional[int] = None
    witness: List[List[str]] = Field(default_factory=list)
    text: str


class CoverModel(BaseModel):
    lower: str
    upper: str
    witness: str


class BridgeReport(BaseModel):
    algebra: str
    bands: List[str]
    covers: List[CoverModel]
    bound: int
    stable: bool


class ModuleReport(BaseModel):
    algebra: str
    kind: str
    description: str
    field: str
    dims: Dict[str, int]
    matrices: Dict[str, List[List[str]]]
    relations_vanish: bool


class PPReport(BaseModel):
    algebra: str
    formula: str
    vertex: str
    partition: Dict[str, Dict[str, int]]
    dimension: int
    ambient: int
    basis: List[List[str]]
    element: Optional[List[str]] = None
    satisfied: Optional[bool] = None


class WordOfReport(BaseModel):
    algebra: str
    vertex: str
    element: List[str]
    partition: Dict[str, Dict[str, int]]
    left: str
    right: str
    word: str


class HomogeneityReport(BaseModel):
    algebra: str
    vertex: str
    element: List[str]
    partition: Dict[str, Dict[str, int]]
    word: str
    homogeneous: bool
    witness: Optional[List[str]] = None


class HomReport(BaseModel):
    algebra: str
    source: str
    target: str
    triples: List[str]
    count: int
    oracle_count: int


class DescriptorModel(BaseModel):
    variant: str
    text: str
    shapes: List[str] = Field(default_factory=list)
    band: Optional[str] = None
    parameter: Optional[str] = None


class RingelListReport(BaseModel):
    algebra: str
    partition: Dict[str, Dict[str, int]]
    prefix_bound: int
    middle_bound: int
    lambda_samples: List[str]
    entries: List[DescriptorModel]


class TruncationReport(BaseModel):
    """A truncation as a finite word; ``anchor_node`` marks where the anchor of a two-sided word landed."""

    algebra: str
    word: str
    level: int
    truncation: str
    anchor_node: int
    diagram: Optional[str] = None


class OracleModel(BaseModel):
    verdict: str
    levels: List[int]
    answers: List[bool]
    stable: bool
    heuristic: str = "stop after consecutive agreeing truncation levels"


class VerdictReport(BaseModel):
    algebra: str
    word: str
    partition: Dict[str, Dict[str, int]]
    formula: str
    verdict: str
    phi: Optional[str] = None
    psi: Optional[str] = None
    oracle: Optional[OracleModel] = None


class SuiteResult(BaseModel):
    name: str
    passed: bool
    checked: int = 0
    skipped: bool = False
    reason: Optional[str] = None
    failures: List[str] = Field(default_factory=list)


class AuditReport(BaseModel):
    algebra: str
    seed: int
    field: str
    partition: Dict[str, Dict[str, int]]
    suites: List[SuiteResult]
    passed: bool


REPORT_MODELS = {
    "validate": ValidationReport,
    "bands": BandsReport,
    "domestic": DomesticReport,
    "bridge": BridgeReport,
    "module": ModuleReport,
    "pp": PPReport,
    "word-of": WordOfReport,
    "homog": HomogeneityReport,
    "hom": HomReport,
    "ringel-list": RingelListReport,
    "ringel-truncate": TruncationReport,
    "ringel-verdict": VerdictReport,
    "audit": AuditReport,
}


def report_schemas() -> Dict[str, dict]:
    return {name: model.model_json_schema() for name, model in REPORT_MODELS.items()}
