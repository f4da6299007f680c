"""Solver configuration and the records a flow run produces."""

from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from csf.models.curve import BoundingBox, CurveTopology, DiscreteCurve
from csf.types import FloatArray


class SolverConfig(BaseModel):
    """Time-step policy and stopping rule."""

    model_config = ConfigDict(frozen=True)

    k_cap: float = Field(default=1e6, gt=0.0)
    dt_min: float = Field(default=1e-9, gt=0.0)
    dt_max: float = Field(default=1e-4, gt=0.0)
    snapshot_stride: int = Field(default=100, ge=1)
    max_steps: int = Field(default=1_000_000, ge=1)
    safety: float = Field(default=0.9, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_dt_range(self) -> "SolverConfig":
        if not self.dt_min < self.dt_max:
            raise ValueError(f"dt_min ({self.dt_min}) must be below dt_max ({self.dt_max})")
        return self


class StepCoefficients(BaseModel):
    """The K_i = 2 dt / (|e_i|^2 + |e_{i-1}|^2) of one implicit step."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    K: FloatArray
    dt: float = Field(gt=0.0)

    @field_validator("K")
    @classmethod
    def _check_positive(cls, K: FloatArray) -> FloatArray:
        K = np.array(K, dtype=np.float64)
        if not np.all(np.isfinite(K)) or np.any(K <= 0.0):
            raise ValueError("step coefficients must be finite and positive")
        K.setflags(write=False)
        return K

    @property
    def max_K(self) -> float:
        return float(self.K.max())


class StopReason(StrEnum):
    DT_UNDERFLOW = "dt_underflow"
    MAX_STEPS = "max_steps"
    NUMERICAL_FAILURE = "numerical_failure"
    HALTED = "halted"


class FlowSnapshot(BaseModel):
    """Curve state at one recorded time."""

    model_config = ConfigDict(frozen=True)

    step: int = Field(ge=0)
    time: float = Field(ge=0.0)
    curve: DiscreteCurve
    dt_used: float = Field(gt=0.0)
    max_K: float = Field(ge=0.0)
    box: BoundingBox
    topology: CurveTopology | None = None


class Trajectory(BaseModel):
    """Snapshots of one flow run, in time order, and why the run ended."""

    model_config = ConfigDict(frozen=True)

    snapshots: list[FlowSnapshot]
    stop_reason: StopReason
    config: SolverConfig = Field(default_factory=SolverConfig)
    steps: int = Field(default=0, ge=0)
    label: str = ""

    @model_validator(mode="after")
    def _check_times(self) -> "Trajectory":
        times = [s.time for s in self.snapshots]
        if any(b <= a for a, b in zip(times, times[1:], strict=False)):
            raise ValueError("snapshot times must be strictly increasing")
        return self

    @property
    def final(self) -> FlowSnapshot:
        return self.snapshots[-1]

    @property
    def times(self) -> FloatArray:
        return np.array([s.time for s in self.snapshots])
