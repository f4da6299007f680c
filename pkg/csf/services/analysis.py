"""Asymptotic diagnostics for shrinking n-loops.

Near the singular time a shrinking n-loop is the union of the graphs
y = +-u(t, x), and u is expected to follow K U_{n-1}(t - T, x) away from the
caps. This module pulls u out of the polygons, fits T from the loop-area
law A(t) ~ pi (T - t), fits K, and measures how far the anisotropically
rescaled curve is from xi^(n-1).
"""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict

from csf.models.curve import CurveTopology, DiscreteCurve, Region, RegionKind
from csf.models.experiment import ProfileFit
from csf.models.flow import FlowSnapshot, Trajectory
from csf.services.geometry import bounding_box
from csf.services.heat import HeatPolynomial, largest_zero_scaled
from csf.services.topology import TriplePointError, analyze_topology
from csf.types import FloatArray

logger = logging.getLogger(__name__)

RegionSelector = Callable[[CurveTopology], Region | None]

FIT_WINDOW = 10
MIN_AREA_SAMPLES = 5
RESOLVED_RATE_FRACTION = 0.5
GRID_SIZE = 401


class DegenerateBoxError(Exception):
    """Raised when a bounding box has zero width or height."""

    pass


class FitUnreliableError(Exception):
    """Raised when the data cannot support a fit."""

    pass


class NotGraphLikeError(Exception):
    """Raised when a curve is not the union of an upper and a lower graph."""

    pass


# Region selectors


def rightmost_loop(topology: CurveTopology) -> Region | None:
    loops = topology.loops()
    return max(loops, key=lambda r: r.centroid[0]) if loops else None


def leftmost_loop(topology: CurveTopology) -> Region | None:
    loops = topology.loops()
    return min(loops, key=lambda r: r.centroid[0]) if loops else None


def smallest_loop(topology: CurveTopology) -> Region | None:
    loops = topology.loops()
    return min(loops, key=lambda r: r.area) if loops else None


def largest_loop(topology: CurveTopology) -> Region | None:
    loops = topology.loops()
    return max(loops, key=lambda r: r.area) if loops else None


def largest_eye(topology: CurveTopology) -> Region | None:
    eyes = topology.eyes()
    return max(eyes, key=lambda r: r.area) if eyes else None


def whole_curve(topology: CurveTopology) -> Region | None:
    disks = [r for r in topology.regions if r.kind == RegionKind.DISK]
    return disks[0] if disks else None


SELECTORS: dict[str, RegionSelector] = {
    "rightmost_loop": rightmost_loop,
    "leftmost_loop": leftmost_loop,
    "smallest_loop": smallest_loop,
    "innermost_loop": smallest_loop,
    "largest_loop": largest_loop,
    "largest_eye": largest_eye,
    "whole_curve": whole_curve,
}


# Rescaling


def cs_rescale(curve: DiscreteCurve) -> DiscreteCurve:
    """Affine map taking the bounding box onto [-1, 1]^2."""
    box = bounding_box(curve)
    if box.width <= 0 or box.height <= 0:
        raise DegenerateBoxError(f"box {box.width:.3e} x {box.height:.3e} cannot be rescaled")
    cx, cy = box.center
    scale = np.array([box.width / 2.0, box.height / 2.0])
    return DiscreteCurve(vertices=(curve.vertices - np.array([cx, cy])) / scale)


# Area law


class AreaFit(BaseModel):
    """Line fits of a region area against time over ``[window_start, window_end]``."""

    model_config = ConfigDict(frozen=True)

    T_est: float
    intercept: float
    free_slope: float
    free_intercept: float
    T_free: float | None
    window_start: float
    window_end: float
    samples: int


class AreaRate(BaseModel):
    model_config = ConfigDict(frozen=True)

    t0: float
    t1: float
    rate: float
    predicted: float | None


def _tracked_areas(
    snapshots: Sequence[FlowSnapshot], selector: RegionSelector
) -> list[tuple[float, Region]]:
    tracked = []
    for snapshot in snapshots:
        try:
            topology = snapshot.topology or analyze_topology(snapshot.curve)
        except TriplePointError:
            continue
        region = selector(topology)
        if region is not None:
            tracked.append((snapshot.time, region))
    return tracked


def _resolved(tracked: list[tuple[float, Region]]) -> list[tuple[float, Region]]:
    """Drop trailing samples whose area loss has stalled below the corner-implied rate.

    Once the tracked region is a handful of vertices wide its area stops
    falling at the rate its corner angles imply; those samples are discarded.
    """
    end = len(tracked)
    while end >= 2:
        (t0, r0), (t1, r1) = tracked[end - 2], tracked[end - 1]
        rate = (r1.area - r0.area) / (t1 - t0)
        predicted = r0.predicted_rate
        if predicted is None or rate <= RESOLVED_RATE_FRACTION * predicted:
            break
        end -= 1
    if end < len(tracked):
        logger.info(
            "dropped %d under-resolved samples after t=%.8g",
            len(tracked) - end,
            tracked[end - 1][0],
        )
    return tracked[:end]


def fit_area_law(times: Sequence[float], areas: Sequence[float]) -> AreaFit:
    """Fit A(t) = c - pi t (T = c / pi) and a free line for comparison."""
    t = np.asarray(times, dtype=np.float64)
    area = np.asarray(areas, dtype=np.float64)
    if len(t) < 2:
        raise FitUnreliableError("need at least two area samples")
    if np.any(np.diff(t) <= 0) or np.any(np.diff(area) >= 0):
        raise FitUnreliableError("areas are not strictly decreasing in time")
    intercept = float(np.mean(area + np.pi * t))
    free_slope, free_intercept = (float(v) for v in np.polyfit(t, area, 1))
    return AreaFit(
        T_est=intercept / np.pi,
        intercept=intercept,
        free_slope=free_slope,
        free_intercept=free_intercept,
        T_free=-free_intercept / free_slope if free_slope < 0 else None,
        window_start=float(t[0]),
        window_end=float(t[-1]),
        samples=len(t),
    )


def _fit_tracked(tracked: Sequence[tuple[float, Region]]) -> AreaFit:
    return fit_area_law([t for t, _ in tracked], [r.area for _, r in tracked])


def estimate_T(
    trajectory: Trajectory,
    region_selector: RegionSelector = rightmost_loop,
    window: int = FIT_WINDOW,
) -> AreaFit:
    """Singular time from the tracked region's area law over its last resolved decade.

    A first fit over the last ``window`` resolved samples places T; the final
    fit uses every resolved sample with T - t within ten times the gap left
    at the last one.
    """
    tracked = _resolved(_tracked_areas(trajectory.snapshots, region_selector))
    if len(tracked) < MIN_AREA_SAMPLES:
        raise FitUnreliableError(
            f"only {len(tracked)} resolved snapshots carry the tracked region, "
            f"need {MIN_AREA_SAMPLES}"
        )
    fit = _fit_tracked(tracked[-window:])
    gap = fit.T_est - tracked[-1][0]
    if gap > 0:
        decade = [(t, r) for t, r in tracked if fit.T_est - t <= 10.0 * gap]
        if len(decade) >= MIN_AREA_SAMPLES:
            fit = _fit_tracked(decade)
    logger.info(
        "T_est=%.8g (free slope %.4f) from %d samples in [%.8g, %.8g]",
        fit.T_est,
        fit.free_slope,
        fit.samples,
        fit.window_start,
        fit.window_end,
    )
    return fit


def area_rates(trajectory: Trajectory, region_selector: RegionSelector) -> list[AreaRate]:
    """Finite-difference dA/dt of a tracked region between consecutive snapshots."""
    tracked = _tracked_areas(trajectory.snapshots, region_selector)
    return [
        AreaRate(
            t0=t0,
            t1=t1,
            rate=(r1.area - r0.area) / (t1 - t0),
            predicted=r0.predicted_rate,
        )
        for (t0, r0), (t1, r1) in zip(tracked, tracked[1:], strict=False)
    ]


def predicted_loop_area(K: float, n: int, a: float) -> float:
    """Outer-loop area (2K/n) a^n implied by u = K x^(n-1) on [0, a]."""
    return 2.0 * K * a**n / n


# Branches


class BranchSample(BaseModel):
    """Upper branch u(x) of one snapshot on a centered grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    time: float
    a: float
    b: float
    x_star: float | None
    x: FloatArray
    u: FloatArray

    @property
    def b_over_a(self) -> float:
        return self.b / self.a


def _half(x: FloatArray, start: int, stop: int) -> NDArray[np.intp]:
    n = len(x)
    return (np.arange(start, start + (stop - start) % n + 1)) % n


def _graph(x: FloatArray, y: FloatArray, indices: NDArray[np.intp], slack: float) -> FloatArray:
    xs, ys = x[indices], y[indices]
    steps = np.diff(xs)
    if np.all(steps <= slack):
        xs, ys = xs[::-1], ys[::-1]
    elif not np.all(steps >= -slack):
        raise NotGraphLikeError("a half of the curve is not monotone in x")
    order = np.argsort(xs, kind="stable")
    return np.column_stack([xs[order], ys[order]])


def _rightmost_zero(grid: FloatArray, u: FloatArray) -> float | None:
    change = np.nonzero((np.sign(u[:-1]) * np.sign(u[1:]) < 0) & (grid[1:] > 0))[0]
    if len(change) == 0:
        return None
    i = int(change[-1])
    return float(grid[i] - u[i] * (grid[i + 1] - grid[i]) / (u[i + 1] - u[i]))


def _outer_peak(branch: FloatArray, start: float) -> float:
    """x of the largest |u| right of ``start``, refined by a parabola through three vertices."""
    xs, ys = branch[:, 0], np.abs(branch[:, 1])
    candidates = np.nonzero(xs >= start)[0]
    i = int(candidates[np.argmax(ys[candidates])])
    if i == 0 or i == len(xs) - 1:
        return float(xs[i])
    near = xs[i - 1 : i + 2] - xs[i]
    if np.any(np.diff(near) <= 0):
        return float(xs[i])
    c2, c1, _ = np.polyfit(near, ys[i - 1 : i + 2], 2)
    if c2 >= 0:
        return float(xs[i])
    return float(xs[i] + np.clip(-c1 / (2.0 * c2), near[0], near[2]))


def extract_branch(curve: DiscreteCurve, time: float, grid_size: int = GRID_SIZE) -> BranchSample:
    """Split the curve at its extreme-x vertices and resample the upper half.

    Coordinates are centered on the bounding box. ``b`` is the x of the
    largest |u| right of the rightmost interior zero ``x_star``, read off the
    polygon's own vertices rather than the grid.
    """
    box = bounding_box(curve)
    if box.width <= 0 or box.height <= 0:
        raise NotGraphLikeError("curve has a degenerate bounding box")
    cx, cy = box.center
    x = curve.x - cx
    y = curve.y - cy
    a = box.width / 2.0
    slack = 1e-12 * box.width
    right, left = int(np.argmax(x)), int(np.argmin(x))
    first = _graph(x, y, _half(x, right, left), slack)
    second = _graph(x, y, _half(x, left, right), slack)

    grid = np.linspace(-a, a, grid_size)[1:-1]
    u_first = np.interp(grid, first[:, 0], first[:, 1])
    u_second = np.interp(grid, second[:, 0], second[:, 1])
    outer = grid > a / 2.0
    upper_first = np.mean(u_first[outer] - u_second[outer]) >= 0
    upper, u = (first, u_first) if upper_first else (second, u_second)

    x_star = _rightmost_zero(grid, u)
    b = _outer_peak(upper, max(x_star or 0.0, 0.0))
    return BranchSample(time=time, a=a, b=b, x_star=x_star, x=grid, u=u)


def fit_amplitude(samples: Sequence[BranchSample], n: int, T_est: float) -> float:
    """Least-squares K in u(t, x) = K U_{n-1}(t - T, x) over |x| <= b/2."""
    model = HeatPolynomial(m=n - 1)
    numerator = denominator = 0.0
    for sample in samples:
        inner = np.abs(sample.x) <= sample.b / 2.0
        basis = model(sample.time - T_est, sample.x[inner])
        numerator += float(np.dot(sample.u[inner], basis))
        denominator += float(np.dot(basis, basis))
    if denominator == 0.0 or not math.isfinite(numerator / denominator):
        raise FitUnreliableError("no usable samples for the amplitude fit")
    K = numerator / denominator
    if K == 0.0:
        raise FitUnreliableError("fitted amplitude vanished")
    return K


def zero_ratios(samples: Sequence[BranchSample], n: int, T_est: float) -> list[float]:
    """x_*(t) / (2 sqrt(T - t) z_{n-1}) per sample; tends to 1 for a shrinking n-loop."""
    z = largest_zero_scaled(n - 1)
    ratios = []
    for sample in samples:
        if sample.x_star is None:
            raise NotGraphLikeError(f"no interior zero at t={sample.time}")
        if sample.time >= T_est:
            raise FitUnreliableError("sample lies past the singular time")
        ratios.append(sample.x_star / (2.0 * math.sqrt(T_est - sample.time) * z))
    return ratios


def profile_deviation(sample: BranchSample, n: int) -> float:
    """Sup distance of u/|u(b)| from xi^(n-1) on |xi| <= b/a."""
    xi = sample.x / sample.a
    peak = abs(float(np.interp(sample.b, sample.x, sample.u)))
    if peak == 0.0:
        raise FitUnreliableError("upper branch vanishes at b")
    inner = np.abs(xi) <= sample.b_over_a
    return float(np.max(np.abs(sample.u[inner] / peak - xi[inner] ** (n - 1))))


def profile_corner_angle(sample: BranchSample) -> float:
    """Loop corner pi + 2 arctan u_x(x_*) read off the graph."""
    if sample.x_star is None:
        raise NotGraphLikeError("no interior zero to measure the corner at")
    slope = float(np.interp(sample.x_star, sample.x, np.gradient(sample.u, sample.x)))
    return math.pi + 2.0 * math.atan(slope)


def _loglog_slope(samples: Sequence[BranchSample], T_est: float) -> float | None:
    gaps = np.array([T_est - s.time for s in samples])
    widths = np.array([s.a for s in samples])
    decade = gaps <= 10.0 * gaps.min()
    if np.count_nonzero(decade) < 3:
        return None
    return float(np.polyfit(np.log(gaps[decade]), np.log(widths[decade]), 1)[0])


def fit_profile(
    trajectory: Trajectory,
    n: int,
    T_est: float | None = None,
    window: int = FIT_WINDOW,
) -> ProfileFit:
    """Fit the heat-polynomial profile of a shrinking n-loop trajectory.

    With T estimated from the area law, only snapshots up to the end of the
    resolved area window are used, so the width, amplitude and profile fits
    share the regime the area law was fitted on.
    """
    area_slope = None
    window_end = trajectory.final.time
    if T_est is None:
        area = estimate_T(trajectory, rightmost_loop, window)
        T_est, area_slope, window_end = area.T_est, area.free_slope, area.window_end
    if not T_est > window_end:
        raise FitUnreliableError(f"T_est={T_est} does not exceed the last time {window_end}")

    resolved = [s for s in trajectory.snapshots if s.time <= window_end]
    decade_floor = T_est - 10.0 * (T_est - window_end)
    chosen = [
        s
        for i, s in enumerate(resolved)
        if s.time >= decade_floor or i >= len(resolved) - window
    ]
    samples = [extract_branch(s.curve, s.time) for s in chosen]
    recent = samples[-window:]
    K = fit_amplitude(recent, n, T_est)
    last = samples[-1]

    zero_ratio = None
    if last.x_star is not None and n >= 2:
        zero_ratio = zero_ratios([last], n, T_est)[0]
    prefactor = ((n * math.pi / (2.0 * abs(K))) * (T_est - last.time)) ** (1.0 / n)
    fit = ProfileFit(
        n=n,
        T_est=T_est,
        K_est=K,
        b_over_a=[s.b_over_a for s in samples],
        deviation=profile_deviation(last, n),
        slope_loglog=_loglog_slope(samples, T_est),
        area_slope=area_slope,
        area_prefactor_ratio=last.a / prefactor,
        zero_ratio=zero_ratio,
    )
    logger.info(
        "profile fit n=%d: K=%.5g slope=%s deviation=%.4f",
        n,
        K,
        fit.slope_loglog,
        fit.deviation,
    )
    return fit


def zero_ratio_history(trajectory: Trajectory, n: int, T_est: float | None = None) -> list[float]:
    """Largest-zero ratios for every snapshot before the singular time."""
    if T_est is None:
        T_est = estimate_T(trajectory).T_est
    samples = [
        extract_branch(s.curve, s.time) for s in trajectory.snapshots if s.time < T_est
    ]
    return zero_ratios(samples, n, T_est)
