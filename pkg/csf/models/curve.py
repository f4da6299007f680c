"""Discrete curves and the measurements taken on them."""

from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from csf.types import FloatArray, Points

MIN_VERTICES = 8


class DiscreteCurve(BaseModel):
    """Closed polygon of N plane vertices, indexed modulo N."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: Points

    @field_validator("vertices")
    @classmethod
    def _check_vertices(cls, vertices: FloatArray) -> FloatArray:
        if len(vertices) < MIN_VERTICES:
            raise ValueError(f"a curve needs at least {MIN_VERTICES} vertices, got {len(vertices)}")
        if not np.all(np.isfinite(vertices)):
            raise ValueError("vertices must be finite")
        lengths = np.hypot(*(np.roll(vertices, -1, axis=0) - vertices).T)
        if np.any(lengths == 0.0):
            index = int(np.argmin(lengths))
            raise ValueError(f"vertices {index} and {(index + 1) % len(vertices)} coincide")
        return vertices

    @property
    def n_points(self) -> int:
        return len(self.vertices)

    @property
    def x(self) -> FloatArray:
        return self.vertices[:, 0]

    @property
    def y(self) -> FloatArray:
        return self.vertices[:, 1]

    def segment_vectors(self) -> FloatArray:
        """Vectors from vertex i to vertex i+1."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def segment_lengths(self) -> FloatArray:
        return np.hypot(*self.segment_vectors().T)

    def diameter(self) -> float:
        """Diagonal of the bounding box, the length scale for tolerances."""
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.hypot(*span))


class BoundingBox(BaseModel):
    """Axis-aligned box around a curve."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @model_validator(mode="after")
    def _check_order(self) -> "BoundingBox":
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("box extents must be ordered")
        return self

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.width, self.height))

    @property
    def aspect(self) -> float:
        """H/W, infinite for a vertical segment."""
        return self.height / self.width if self.width > 0 else float("inf")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))


class Intersection(BaseModel):
    """Transverse crossing of two non-adjacent segments."""

    point: tuple[float, float]
    seg_a: int = Field(ge=0)
    seg_b: int = Field(ge=0)
    s_a: float = Field(ge=0.0, le=1.0)
    s_b: float = Field(ge=0.0, le=1.0)
    angle: float = Field(ge=0.0, le=np.pi / 2)
    near_tangent: bool = False

    @model_validator(mode="after")
    def _check_segments(self) -> "Intersection":
        if self.seg_a == self.seg_b:
            raise ValueError("an intersection needs two different segments")
        return self

    @property
    def param_a(self) -> float:
        """Position of the first visit along the curve, in segment units."""
        return self.seg_a + self.s_a

    @property
    def param_b(self) -> float:
        return self.seg_b + self.s_b


class RegionKind(StrEnum):
    LOOP = "loop"
    EYE = "eye"
    DISK = "disk"


class CornerKind(StrEnum):
    CONVEX = "convex"
    CONCAVE = "concave"


class Region(BaseModel):
    """Bounded region cut out by the curve: a loop, an eye, or the disk of an embedded curve."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: RegionKind
    corner: CornerKind | None = None
    corners: list[int] = Field(default_factory=list)
    corner_angles: list[float] = Field(default_factory=list)
    area: float = Field(ge=0.0)
    boundary: Points

    @model_validator(mode="after")
    def _check_corners(self) -> "Region":
        expected = {RegionKind.LOOP: 1, RegionKind.EYE: 2, RegionKind.DISK: 0}[self.kind]
        if len(self.corners) != expected or len(self.corner_angles) != expected:
            raise ValueError(f"a {self.kind} region has exactly {expected} corner(s)")
        if (self.kind == RegionKind.LOOP) != (self.corner is not None):
            raise ValueError("only loops carry a corner kind")
        return self

    @property
    def centroid(self) -> tuple[float, float]:
        cx, cy = self.boundary.mean(axis=0)
        return (float(cx), float(cy))

    @property
    def predicted_rate(self) -> float | None:
        """Area loss rate implied by the corner angles: -alpha for a loop, -2pi+b1+b2 for an eye."""
        if self.kind == RegionKind.LOOP:
            return -self.corner_angles[0]
        if self.kind == RegionKind.EYE:
            return -2.0 * np.pi + sum(self.corner_angles)
        return -2.0 * np.pi


class CurveTopology(BaseModel):
    """Self-intersections of a curve and the loops and eyes they cut out."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    intersections: list[Intersection]
    regions: list[Region]
    turning_number: int

    def loops(self) -> list[Region]:
        return [r for r in self.regions if r.kind == RegionKind.LOOP]

    def eyes(self) -> list[Region]:
        return [r for r in self.regions if r.kind == RegionKind.EYE]
