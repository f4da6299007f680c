"""API request and response models."""

from datetime import datetime

from pydantic import BaseModel, ConfigDict, Field

from csf.models.curve import BoundingBox, CornerKind, Intersection, Region, RegionKind
from csf.models.experiment import Outcome
from csf.models.family import FamilySpec
from csf.models.flow import SolverConfig, StopReason
from csf.models.links import Link
from csf.types import Points


class RunCreate(BaseModel):
    """Request body for starting a run."""

    family: FamilySpec
    solver: SolverConfig = Field(default_factory=SolverConfig)
    expected_n: int | None = Field(None, ge=1, description="Defaults to the family's loop count")
    shrink_eps: float | None = Field(None, gt=0.0)


class RunSummary(BaseModel):
    """A stored run without its vertex data."""

    id: str
    family: FamilySpec
    solver: SolverConfig
    expected_n: int
    outcome: Outcome
    stop_reason: StopReason
    steps: int
    final_time: float
    final_box: BoundingBox
    snapshot_count: int
    created_at: datetime
    links: dict[str, Link]


class RegionSummary(BaseModel):
    kind: RegionKind
    corner: CornerKind | None
    corners: list[int]
    corner_angles: list[float]
    area: float

    @classmethod
    def from_region(cls, region: Region) -> "RegionSummary":
        return cls(
            kind=region.kind,
            corner=region.corner,
            corners=region.corners,
            corner_angles=region.corner_angles,
            area=region.area,
        )


class CurveResponse(BaseModel):
    """Vertices of a curve with its box and topology."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertices: Points
    box: BoundingBox
    intersections: list[Intersection]
    regions: list[RegionSummary]
    turning_number: int


class SnapshotResponse(CurveResponse):
    run_id: str
    index: int
    step: int
    time: float
    dt_used: float
    max_K: float
    links: dict[str, Link]


class FamilyResponse(CurveResponse):
    family: FamilySpec


class HeatPolynomialResponse(BaseModel):
    m: int
    coefficients: list[int]
    residual: float
    t: float
    zeros: list[float]
    largest_zero_scaled: float | None
