"""Request/response models for the workbench service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class LatticeModel(BaseModel):
    size: int
    meet: list[list[int]]
    join: list[list[int]]
    neg: list[int]
    labels: Optional[list[str]] = None


class MatrixModel(LatticeModel):
    designated: list[int] = Field(default_factory=list)
    name: str = ""


class MatrixRef(BaseModel):
    """Either a catalog name or an inline matrix."""
    name: Optional[str] = None
    matrix: Optional[MatrixModel] = None


class ValidationReport(BaseModel):
    valid: bool
    violations: list[str]


class LatticeBuildRequest(BaseModel):
    builder: str                      # dm1 | boolean | product | dual | free
    atoms: Optional[int] = None
    factors: Optional[list[str]] = None
    generators: Optional[int] = None


class UpsetRequest(BaseModel):
    matrix: MatrixRef
    members: Optional[list[int]] = None   # defaults to the designated set
    n: int = 1
    kind: str = "plain"


class UpsetClassification(BaseModel):
    members: list[int]
    is_upset: bool
    n_filter_degree: Optional[int]
    n_prime_degree: Optional[int]
    prime: bool
    flags: dict


class GenerateUpsetRequest(BaseModel):
    matrix: MatrixRef
    subset: list[int]
    n: int = 1
    kind: str = "plain"


class SeparateRequest(BaseModel):
    matrix: MatrixRef
    filter_members: list[int]
    ideal_members: list[int]
    n: int = 1
    kind: str = "plain"


class RuleCheckRequest(BaseModel):
    rule: str
    matrix: MatrixRef


class RuleCheckResponse(BaseModel):
    rule: str
    matrix: str
    valid: bool
    countervaluation: Optional[dict] = None


class RuleTransformResponse(BaseModel):
    input: str
    output: str


class DeriveRequest(BaseModel):
    logic: str
    rule: str


class DeriveResponse(BaseModel):
    logic: str
    rule: str
    derivable: bool
    counterexample: Optional[dict] = None


class CompareRequest(BaseModel):
    left: str
    right: str
    max_factors: int = 3


class CompareResponse(BaseModel):
    verdict: str                       # true | false | inconclusive
    reverse_verdict: str
    separating_rule: Optional[str] = None
    reverse_separating_rule: Optional[str] = None
    witnesses: dict
    reverse_witnesses: dict


class PcpRequest(BaseModel):
    logic: str
    n: int = 1
    var_limit: int = 4


class PcpResponse(BaseModel):
    logic: str
    n: int
    verdict: str
    detail: Optional[dict] = None
    pool_size: Optional[int] = None


class HierarchyRequest(BaseModel):
    kind: str = "prime"
    n: int = 2


class HierarchyClassInfo(BaseModel):
    name: str
    size: int
    designated: int
    logic_class: int


class HierarchyResponse(BaseModel):
    kind: str
    n: int
    classes: list[HierarchyClassInfo]
    logic_class_count: int
    poset_nodes: Optional[list[str]] = None
    poset_edges: Optional[list[list[str]]] = None


class TableRow(BaseModel):
    structure: str
    rule: Optional[str]
    ok: Optional[bool]
    fails_in_own: Optional[bool] = None
    holds_in_not_above: Optional[bool] = None
    offenders: list[str] = Field(default_factory=list)
    note: str = ""


class TableReport(BaseModel):
    corrected: bool
    all_ok: bool
    rows: list[TableRow]


class AxiomatizeRequest(BaseModel):
    kind: str = "prime"
    n: int = 2
    target: list[str]


class AxiomatizeResponse(BaseModel):
    target: list[str]
    minimal_excluded: list[str]
    output_rules: list[str]
    transcript: list[str]
    verified: bool


class LatticeOfLogicsResponse(BaseModel):
    kind: str
    n: int
    node_count: int
    cover_count: int
    distributive: bool
    node_families: Optional[list[list[str]]] = None


class ProveRequest(BaseModel):
    sequent: str
    n: int = 2
    axioms: list[str] = Field(default_factory=list)
    base: str = "upsets"               # upsets | BD1
    max_depth: int = 6


class ProveResponse(BaseModel):
    sequent: str
    proved: bool
    proof: Optional[dict] = None
    pretty: Optional[str] = None


class VerifySuiteResponse(BaseModel):
    suite: str
    passed: bool
    lines: list[str]
