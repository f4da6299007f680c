"""Decomposition of an immersed curve into loops and eyes."""

import logging
from itertools import combinations

import numpy as np
from matplotlib.path import Path
from pydantic import BaseModel, ConfigDict

from csf.models.curve import (
    CornerKind,
    CurveTopology,
    DiscreteCurve,
    Intersection,
    Region,
    RegionKind,
)
from csf.services.geometry import (
    MERGE_TOLERANCE,
    self_intersections,
    signed_area,
    turning_angles,
    turning_number,
)
from csf.types import FloatArray

logger = logging.getLogger(__name__)


class TriplePointError(Exception):
    """Raised when three branches of the curve meet at one point."""

    pass


class _Arc(BaseModel):
    """Piece of the curve between two consecutive crossing visits."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    start: float
    end: float
    first: int
    last: int
    vertices: FloatArray

    @property
    def is_loop(self) -> bool:
        return self.first == self.last


def _arc_vertices(points: FloatArray, start: float, end: float) -> FloatArray:
    n = len(points)
    indices = np.arange(int(np.floor(start)) + 1, int(np.floor(end)) + 1) % n
    return points[indices]


def _clean(polygon: FloatArray, floor: float) -> FloatArray:
    """Drop points that repeat their predecessor, including the wrap-around."""
    steps = np.hypot(*(polygon - np.roll(polygon, 1, axis=0)).T)
    keep = steps > floor
    if not np.any(keep):
        return polygon[:1]
    return polygon[keep]


def _check_triple_points(intersections: list[Intersection], tol: float) -> None:
    for first, second in combinations(intersections, 2):
        gap = np.hypot(first.point[0] - second.point[0], first.point[1] - second.point[1])
        if gap <= tol:
            raise TriplePointError(
                f"crossings at {first.point} and {second.point} are {gap:.2e} apart"
            )


def _arcs(curve: DiscreteCurve, intersections: list[Intersection]) -> list[_Arc]:
    points = curve.vertices
    n = len(points)
    visits = sorted(
        [(x.param_a, k) for k, x in enumerate(intersections)]
        + [(x.param_b, k) for k, x in enumerate(intersections)]
    )
    arcs = []
    for index, (start, first) in enumerate(visits):
        end, last = visits[(index + 1) % len(visits)]
        if index == len(visits) - 1:
            end += n
        arcs.append(
            _Arc(
                start=start,
                end=end,
                first=first,
                last=last,
                vertices=_arc_vertices(points, start, end),
            )
        )
    return arcs


def _loop_region(arc: _Arc, corner: FloatArray, floor: float) -> Region | None:
    polygon = _clean(np.vstack([corner, arc.vertices]), floor)
    if len(polygon) < 3:
        return None
    signed = signed_area(polygon)
    orientation = 1.0 if signed >= 0 else -1.0
    turns = turning_angles(polygon)
    corner_turn = turns[_nearest(polygon, corner)]
    alpha = float(orientation * (turns.sum() - corner_turn))
    return Region(
        kind=RegionKind.LOOP,
        corner=CornerKind.CONVEX if alpha < 2.0 * np.pi else CornerKind.CONCAVE,
        corners=[arc.first],
        corner_angles=[alpha],
        area=abs(signed),
        boundary=polygon,
    )


def _nearest(polygon: FloatArray, point: FloatArray) -> int:
    return int(np.argmin(np.hypot(*(polygon - point).T)))


def _eye_polygon(first: _Arc, second: _Arc, points: dict[int, FloatArray]) -> FloatArray:
    back = second.vertices if second.first == first.last else second.vertices[::-1]
    return np.vstack([points[first.first], first.vertices, points[first.last], back])


def _eye_region(
    first: _Arc, second: _Arc, points: dict[int, FloatArray], floor: float
) -> Region | None:
    polygon = _clean(_eye_polygon(first, second, points), floor)
    if len(polygon) < 3:
        return None
    signed = signed_area(polygon)
    orientation = 1.0 if signed >= 0 else -1.0
    turns = turning_angles(polygon)
    betas = [
        float(orientation * turns[_nearest(polygon, points[first.first])]),
        float(orientation * turns[_nearest(polygon, points[first.last])]),
    ]
    return Region(
        kind=RegionKind.EYE,
        corners=[first.first, first.last],
        corner_angles=betas,
        area=abs(signed),
        boundary=polygon,
    )


def _encloses_other(polygon: FloatArray, others: list[_Arc]) -> bool:
    path = Path(polygon)
    for arc in others:
        if len(arc.vertices) and path.contains_point(arc.vertices[len(arc.vertices) // 2]):
            return True
    return False


def decompose_regions(
    curve: DiscreteCurve, intersections: list[Intersection], tol: float | None = None
) -> CurveTopology:
    """Split a curve into its loops and eyes.

    Arcs between consecutive crossing visits are the building blocks: an arc
    returning to its own crossing is a loop, and two arcs joining the same
    pair of crossings bound an eye. A curve without crossings is one disk.
    """
    diameter = curve.diameter()
    merge = MERGE_TOLERANCE * diameter if tol is None else tol
    _check_triple_points(intersections, merge)
    winding = turning_number(curve)

    if not intersections:
        disk = Region(
            kind=RegionKind.DISK,
            area=abs(signed_area(curve.vertices)),
            boundary=curve.vertices,
        )
        return CurveTopology(intersections=[], regions=[disk], turning_number=winding)

    floor = 1e-14 * diameter
    crossing_points = {k: np.array(x.point) for k, x in enumerate(intersections)}
    arcs = _arcs(curve, intersections)

    regions: list[Region] = []
    for arc in arcs:
        if arc.is_loop:
            region = _loop_region(arc, crossing_points[arc.first], floor)
            if region is not None:
                regions.append(region)

    groups: dict[frozenset[int], list[_Arc]] = {}
    for arc in arcs:
        if not arc.is_loop:
            groups.setdefault(frozenset((arc.first, arc.last)), []).append(arc)
    for group in groups.values():
        for first, second in combinations(group, 2):
            if len(group) > 2:
                polygon = _eye_polygon(first, second, crossing_points)
                others = [a for a in group if a is not first and a is not second]
                if _encloses_other(polygon, others):
                    continue
            region = _eye_region(first, second, crossing_points, floor)
            if region is not None:
                regions.append(region)

    logger.debug(
        "%d crossings: %d loops, %d eyes",
        len(intersections),
        sum(r.kind == RegionKind.LOOP for r in regions),
        sum(r.kind == RegionKind.EYE for r in regions),
    )
    return CurveTopology(intersections=intersections, regions=regions, turning_number=winding)


def analyze_topology(curve: DiscreteCurve) -> CurveTopology:
    """Crossings and regions of a curve in one call."""
    return decompose_regions(curve, self_intersections(curve))
