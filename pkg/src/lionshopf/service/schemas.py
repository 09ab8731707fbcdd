"""Request/response models of the computation service."""

from __future__ import annotations

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class ForestPayload(BaseModel):
    parent: List[int]
    label: List[int]
    h0: List[int] = Field(default_factory=list)
    H: List[List[int]] = Field(default_factory=list)


class PathPayload(BaseModel):
    rows: List[List[float]]  # [t, x1, ..., xd] per breakpoint


class DistributionSpec(BaseModel):
    kind: str
    paths: Optional[List[List[List[float]]]] = None
    probs: Optional[List[float]] = None
    level: Optional[int] = None
    dim: Optional[int] = None
    vector: Optional[List[float]] = None

    def as_spec(self):
        return {k: v for k, v in self.model_dump().items() if v is not None}


class EnumerateRequest(BaseModel):
    gamma: float
    alpha: float = 1.0
    beta: float = 1.0
    d: int = 1


class CatalogEntry(BaseModel):
    key: str
    nodes: int
    grading: Tuple[int, int]
    weight: float
    forest: ForestPayload
    dual_edges: List[Tuple[int, int]]


class EnumerateResponse(BaseModel):
    params: EnumerateRequest
    count: int
    entries: List[CatalogEntry]


class HopfVerifyRequest(BaseModel):
    max_nodes: int = 4
    d: int = 2
    seed: int = 0
    samples: int = 25
    tol_inverse: float = 1e-10
    tol_agree: float = 1e-12
    tamper: Optional[str] = None  # negative-control hook


class IdentityReport(BaseModel):
    name: str
    ok: bool
    worst: Optional[float] = None
    detail: str = ""


class HopfVerifyResponse(BaseModel):
    params: HopfVerifyRequest
    passed: bool
    identities: List[IdentityReport]


class LiftRequest(BaseModel):
    forest: ForestPayload
    tagged_path: PathPayload
    block_paths: List[PathPayload] = Field(default_factory=list)
    s: float = 0.0
    t: float = 1.0
    max_order: int = 4


class LiftResponse(BaseModel):
    shape: List[int]
    tensor: list
    slot_nodes: List[int]
    s: float
    t: float


class DualPairParams(BaseModel):
    p1: float = 1.0
    qprime: float = 2.5
    gamma: float = 2.0
    alpha: float = 1.0
    beta: float = 1.0


class LLNRequest(BaseModel):
    distribution: DistributionSpec
    trees: Optional[List[ForestPayload]] = None
    tagged_index: int = 1
    n_grid: List[int] = Field(default_factory=lambda: [4, 16, 64])
    replications: int = 50
    seed: int = 0
    grid_level: int = 2
    atoms: Optional[int] = None
    threads: int = 1
    dual_pair: DualPairParams = Field(default_factory=DualPairParams)


class LLNRow(BaseModel):
    n: int
    mean: float
    stderr: float
    identity_mean: float


class LLNResponse(BaseModel):
    params: LLNRequest
    rows: List[LLNRow]
    endpoint_gap: float
    endpoint_gap_stderr: float
    endpoint_confident: bool
    monotone_trend: bool


class MetricRequest(BaseModel):
    atoms_v: List[PathPayload]
    atoms_w: List[PathPayload]
    tagged_path: PathPayload
    trees: List[ForestPayload]
    dual_pair: DualPairParams = Field(default_factory=DualPairParams)
    grid_level: int = 5
    method: str = "auto"
    seed: int = 0


class MetricResponse(BaseModel):
    params: MetricRequest
    value: float
    identity_value: float
    permutation: List[int]
    method: str
    grid_level: int
    atoms: int
