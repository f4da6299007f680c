"""Geometric measurements on discrete curves."""

import logging

import numpy as np

from csf.models.curve import BoundingBox, DiscreteCurve, Intersection
from csf.types import FloatArray

logger = logging.getLogger(__name__)

# Relative to the curve diameter
DEGENERATE_SEGMENT = 1e-14
MERGE_TOLERANCE = 1e-9
NEAR_TANGENT_ANGLE = 1e-6

_BLOCK = 256


class DegenerateSegmentError(Exception):
    """Raised when a segment is too short relative to the curve."""

    pass


class NonSimpleBoundaryError(Exception):
    """Raised when a region boundary crosses itself."""

    pass


def _cross(u: FloatArray, v: FloatArray) -> FloatArray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def check_segments(curve: DiscreteCurve) -> FloatArray:
    """Return segment lengths, raising if any is degenerate."""
    lengths = curve.segment_lengths()
    floor = DEGENERATE_SEGMENT * curve.diameter()
    if np.any(lengths <= floor):
        index = int(np.argmin(lengths))
        raise DegenerateSegmentError(
            f"segment {index} has length {lengths[index]:.3e} below {floor:.3e}"
        )
    return lengths


def curvature_vectors(curve: DiscreteCurve) -> FloatArray:
    """Discrete curvature vector at every vertex.

    The second difference divided by the mean of the two adjacent squared
    segment lengths. Exact (1/r towards the center) on regular polygons.
    """
    check_segments(curve)
    forward = curve.segment_vectors()
    backward = np.roll(forward, 1, axis=0)
    squared = (forward**2).sum(axis=1) + (backward**2).sum(axis=1)
    return 2.0 * (forward - backward) / squared[:, None]


def bounding_box(curve: DiscreteCurve) -> BoundingBox:
    low = curve.vertices.min(axis=0)
    high = curve.vertices.max(axis=0)
    return BoundingBox(
        x_min=float(low[0]), x_max=float(high[0]), y_min=float(low[1]), y_max=float(high[1])
    )


def signed_area(polygon: FloatArray) -> float:
    """Shoelace sum over a closed polygon; positive when counterclockwise."""
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def turning_angles(polygon: FloatArray) -> FloatArray:
    """Signed turn at each vertex, from the incoming to the outgoing segment."""
    forward = np.roll(polygon, -1, axis=0) - polygon
    backward = np.roll(forward, 1, axis=0)
    return np.arctan2(_cross(backward, forward), (backward * forward).sum(axis=1))


def turning_number(curve: DiscreteCurve) -> int:
    return int(round(turning_angles(curve.vertices).sum() / (2.0 * np.pi)))


def _crossing_pairs(
    points: FloatArray,
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray, FloatArray]:
    """All crossings of non-adjacent segments of a closed polygon.

    A vertex lying exactly on another segment's line is counted on the
    negative side, consistently for both segments sharing it, so each
    crossing is seen once. Returns (seg_a, seg_b, s_a, s_b, sin_angle).
    """
    n = len(points)
    starts = points
    ends = np.roll(points, -1, axis=0)
    edges = ends - starts
    low = np.minimum(starts, ends)
    high = np.maximum(starts, ends)
    columns = np.arange(n)

    found: list[tuple[FloatArray, ...]] = []
    for first in range(0, n, _BLOCK):
        rows = np.arange(first, min(first + _BLOCK, n))
        mask = (
            (low[rows, None, 0] <= high[None, :, 0])
            & (high[rows, None, 0] >= low[None, :, 0])
            & (low[rows, None, 1] <= high[None, :, 1])
            & (high[rows, None, 1] >= low[None, :, 1])
            & (columns[None, :] > rows[:, None] + 1)
        )
        mask &= ~((rows[:, None] == 0) & (columns[None, :] == n - 1))
        r, c = np.nonzero(mask)
        if len(r) == 0:
            continue
        a, b = rows[r], columns[c]
        ea, eb = edges[a], edges[b]
        b_start = _cross(ea, starts[b] - starts[a]) > 0
        b_end = _cross(ea, ends[b] - starts[a]) > 0
        a_start = _cross(eb, starts[a] - starts[b]) > 0
        a_end = _cross(eb, ends[a] - starts[b]) > 0
        denom = _cross(ea, eb)
        hit = (b_start != b_end) & (a_start != a_end) & (denom != 0.0)
        if not np.any(hit):
            continue
        a, b, ea, eb, denom = a[hit], b[hit], ea[hit], eb[hit], denom[hit]
        offset = starts[b] - starts[a]
        s_a = np.clip(_cross(offset, eb) / denom, 0.0, 1.0)
        s_b = np.clip(_cross(offset, ea) / denom, 0.0, 1.0)
        norms = np.hypot(*ea.T) * np.hypot(*eb.T)
        found.append((a, b, s_a, s_b, np.abs(denom) / norms))

    if not found:
        empty = np.empty(0)
        return empty, empty, empty, empty, empty
    a, b, s_a, s_b, sines = (np.concatenate(parts) for parts in zip(*found, strict=True))
    return a, b, s_a, s_b, sines


def _adjacent(i: int, j: int, n: int) -> bool:
    return (i - j) % n in (0, 1, n - 1)


def self_intersections(curve: DiscreteCurve, tol: float | None = None) -> list[Intersection]:
    """Every transverse crossing of non-adjacent segments, reported once.

    Crossings closer than ``tol`` (default 1e-9 x diameter) whose segment
    pairs neighbour each other are the same crossing seen at a shared
    vertex and are merged. Nearly tangent crossings are flagged, not dropped.
    """
    if tol is not None and tol < 0:
        raise ValueError("tol must be nonnegative")
    merge = MERGE_TOLERANCE * curve.diameter() if tol is None else tol
    points = curve.vertices
    n = len(points)
    seg_a, seg_b, s_a, s_b, sines = _crossing_pairs(points)

    result: list[Intersection] = []
    for a, b, sa, sb, sine in zip(seg_a, seg_b, s_a, s_b, sines, strict=True):
        a, b = int(a), int(b)
        point = points[a] + sa * (points[(a + 1) % n] - points[a])
        duplicate = any(
            _adjacent(a, kept.seg_a, n)
            and _adjacent(b, kept.seg_b, n)
            and np.hypot(point[0] - kept.point[0], point[1] - kept.point[1]) <= merge
            for kept in result
        )
        if duplicate:
            continue
        angle = float(np.arcsin(min(float(sine), 1.0)))
        near_tangent = angle < NEAR_TANGENT_ANGLE
        if near_tangent:
            logger.warning(
                "near-tangent crossing of segments %d and %d (angle %.2e)", a, b, angle
            )
        result.append(
            Intersection(
                point=(float(point[0]), float(point[1])),
                seg_a=a,
                seg_b=b,
                s_a=float(sa),
                s_b=float(sb),
                angle=angle,
                near_tangent=near_tangent,
            )
        )
    return result


def is_simple(polygon: FloatArray) -> bool:
    """True when no two non-adjacent edges of the closed polygon cross."""
    if len(polygon) < 4:
        return True
    seg_a, *_ = _crossing_pairs(np.asarray(polygon, dtype=np.float64))
    return len(seg_a) == 0


def region_area(boundary: FloatArray) -> float:
    """Area enclosed by a simple closed polygon."""
    polygon = np.asarray(boundary, dtype=np.float64)
    if polygon.ndim != 2 or polygon.shape[1] != 2 or len(polygon) < 3:
        raise ValueError("a boundary needs at least three plane points")
    if not is_simple(polygon):
        raise NonSimpleBoundaryError("region boundary crosses itself")
    return abs(signed_area(polygon))


def vertical_crossings(curve: DiscreteCurve, x0: float) -> int:
    """Number of segments meeting the vertical line x = x0."""
    right = curve.x > x0
    return int(np.count_nonzero(right != np.roll(right, -1)))
