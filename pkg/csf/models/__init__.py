"""Curve shortening flow models - immutable values passed between services."""

from csf.models.curve import (
    BoundingBox,
    CornerKind,
    CurveTopology,
    DiscreteCurve,
    Intersection,
    Region,
    RegionKind,
)
from csf.models.experiment import (
    ExperimentConfig,
    ExperimentReport,
    Outcome,
    OutcomeKind,
    ProbeResult,
    ProfileFit,
    Provenance,
)
from csf.models.family import FamilyName, FamilySpec
from csf.models.flow import FlowSnapshot, SolverConfig, StepCoefficients, StopReason, Trajectory
from csf.models.links import Link

__all__ = [
    "BoundingBox",
    "CornerKind",
    "CurveTopology",
    "DiscreteCurve",
    "ExperimentConfig",
    "ExperimentReport",
    "FamilyName",
    "FamilySpec",
    "FlowSnapshot",
    "Intersection",
    "Link",
    "Outcome",
    "OutcomeKind",
    "ProbeResult",
    "ProfileFit",
    "Provenance",
    "Region",
    "RegionKind",
    "SolverConfig",
    "StepCoefficients",
    "StopReason",
    "Trajectory",
]
