"""Experiment configuration, outcomes and reports."""

from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from csf.models.curve import BoundingBox
from csf.models.family import FamilySpec
from csf.models.flow import SolverConfig, StopReason


class ExperimentConfig(BaseModel):
    """One family, one solver policy, and the lambda bracket to search."""

    model_config = ConfigDict(frozen=True)

    family: FamilySpec
    solver: SolverConfig = Field(default_factory=SolverConfig)
    lambda_interval: tuple[float, float] = (0.40, 0.55)
    bisect_tol: float = Field(default=1e-3, gt=0.0)
    # None means 0.05 x the initial curve's diameter
    shrink_eps: float | None = Field(default=None, gt=0.0)
    expected_n: int = Field(default=3, ge=1)
    parallel_probes: int = Field(default=1, ge=1)
    output_dir: Path = Path("runs")

    @model_validator(mode="after")
    def _check_interval(self) -> "ExperimentConfig":
        low, high = self.lambda_interval
        if not low < high:
            raise ValueError(f"lambda_interval must satisfy low < high, got {self.lambda_interval}")
        return self


class OutcomeKind(StrEnum):
    SHRANK_AS_N_LOOP = "shrank_as_n_loop"
    LOST_INTERSECTIONS = "lost_intersections"
    SINGULAR_NOT_POINT = "singular_not_point"
    TRIPLE_POINT_EVENT = "triple_point_event"
    INCONCLUSIVE = "inconclusive"


class Outcome(BaseModel):
    """Classified end state of one flow run."""

    model_config = ConfigDict(frozen=True)

    kind: OutcomeKind
    n: int | None = None
    at_time: float | None = None
    final_box: BoundingBox | None = None
    reason: str | None = None
    # Largest eye area over smallest ear area seen across snapshots
    max_eye_ear_ratio: float | None = None
    eye_exceeded_ear: bool = False
    eye_exceeded_twice_ear: bool = False

    @property
    def intersections_lost(self) -> bool:
        return self.kind == OutcomeKind.LOST_INTERSECTIONS


class ProfileFit(BaseModel):
    """Fitted asymptotic quantities of a shrinking n-loop."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    T_est: float
    K_est: float
    b_over_a: list[float]
    deviation: float | None = None
    slope_loglog: float | None = None
    area_slope: float | None = None
    area_prefactor_ratio: float | None = None
    zero_ratio: float | None = None


class ProbeResult(BaseModel):
    """One lambda probe of a bisection."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: float = Field(alias="lambda")
    outcome: Outcome
    stop_reason: StopReason
    final_time: float
    final_box: BoundingBox

    @property
    def lost(self) -> bool:
        return self.outcome.intersections_lost


class Provenance(BaseModel):
    family: str
    n_points: int
    k_cap: float
    dt_min: float
    dt_max: float
    snapshot_stride: int
    code_version: str
    lambda_interval: tuple[float, float] | None = None
    bisect_tol: float | None = None


class ExperimentReport(BaseModel):
    """Per-lambda outcomes, the lambda* estimate and the fit for the best run."""

    model_config = ConfigDict(populate_by_name=True)

    outcomes: list[ProbeResult]
    lambda_star: float | None = None
    profile_fit: ProfileFit | None = None
    provenance: Provenance
