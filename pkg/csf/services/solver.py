"""Semi-implicit curve shortening flow solver.

Each step solves the backward Euler system for the reparametrized flow
gamma_t = gamma_uu / |gamma_u|^2: the squared speed is frozen at the old
time level and the second difference taken at the new one, which gives

    -K_i g_{i-1} + (1 + 2 K_i) g_i - K_i g_{i+1} = old g_i

with K_i = 2 dt / (|e_i|^2 + |e_{i-1}|^2), a cyclic tridiagonal system
solved once per coordinate.
"""

import logging
from collections.abc import Callable

import numpy as np
from pydantic import ValidationError
from scipy.linalg import solve_banded

from csf.models.curve import DiscreteCurve
from csf.models.flow import FlowSnapshot, SolverConfig, StepCoefficients, StopReason, Trajectory
from csf.services.geometry import DegenerateSegmentError, bounding_box, check_segments
from csf.types import FloatArray

logger = logging.getLogger(__name__)

HaltPredicate = Callable[[FlowSnapshot], bool]


class IllConditionedError(Exception):
    """Raised when a tridiagonal system is not strictly diagonally dominant."""

    pass


class NumericalFailureError(Exception):
    """Raised when a computation produces non-finite values or fails to converge."""

    pass


def _squared_sums(curve: DiscreteCurve) -> FloatArray:
    squared = check_segments(curve) ** 2
    return squared + np.roll(squared, 1)


def step_coefficients(curve: DiscreteCurve, dt: float) -> StepCoefficients:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    with np.errstate(divide="ignore", over="ignore"):
        K = 2.0 * dt / _squared_sums(curve)
    if not np.all(np.isfinite(K)):
        raise DegenerateSegmentError("step coefficients are not finite")
    return StepCoefficients(K=K, dt=dt)


def solve_cyclic_tridiagonal(
    sub: FloatArray, diag: FloatArray, sup: FloatArray, rhs: FloatArray
) -> FloatArray:
    """Solve a cyclic tridiagonal system for one or more right-hand sides.

    Row i reads sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i] with
    indices mod N, so sub[0] and sup[N-1] are the corner entries. The cyclic
    matrix is split into a tridiagonal part plus a rank-one corner term and
    solved with one banded solve (two right-hand-side blocks) and a
    Sherman-Morrison correction.
    """
    sub = np.asarray(sub, dtype=np.float64)
    diag = np.asarray(diag, dtype=np.float64)
    sup = np.asarray(sup, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    n = len(diag)
    if n < 3 or len(sub) != n or len(sup) != n or len(rhs) != n:
        raise ValueError("cyclic systems need N >= 3 and matching lengths")
    if np.any(np.abs(diag) <= np.abs(sub) + np.abs(sup)):
        row = int(np.argmin(np.abs(diag) - np.abs(sub) - np.abs(sup)))
        raise IllConditionedError(f"row {row} is not strictly diagonally dominant")

    columns = rhs.reshape(n, -1)
    gamma = -diag[0]
    corner_low = sub[0]  # A[0, N-1]
    corner_high = sup[-1]  # A[N-1, 0]

    banded = np.zeros((3, n))
    banded[0, 1:] = sup[:-1]
    banded[1] = diag
    banded[2, :-1] = sub[1:]
    banded[1, 0] -= gamma
    banded[1, -1] -= corner_high * corner_low / gamma

    u = np.zeros(n)
    u[0] = gamma
    u[-1] = corner_high
    solved = solve_banded((1, 1), banded, np.column_stack([columns, u]), check_finite=False)
    y, z = solved[:, :-1], solved[:, -1]
    # v = (1, 0, ..., 0, corner_low / gamma)
    v_y = y[0] + corner_low * y[-1] / gamma
    v_z = z[0] + corner_low * z[-1] / gamma
    result = y - np.outer(z, v_y / (1.0 + v_z))
    return result.reshape(rhs.shape)


def backward_euler_step(
    curve: DiscreteCurve, dt: float, coefficients: StepCoefficients | None = None
) -> DiscreteCurve:
    K = (coefficients or step_coefficients(curve, dt)).K
    vertices = solve_cyclic_tridiagonal(-K, 1.0 + 2.0 * K, -K, curve.vertices)
    if not np.all(np.isfinite(vertices)):
        raise NumericalFailureError("implicit step produced non-finite vertices")
    return DiscreteCurve(vertices=vertices)


def adaptive_dt(curve: DiscreteCurve, config: SolverConfig) -> float:
    """Largest step keeping every K_i at or below safety x k_cap, clamped to dt_max."""
    squared = curve.segment_lengths() ** 2
    smallest = float((squared + np.roll(squared, 1)).min())
    return min(config.dt_max, config.safety * config.k_cap * smallest / 2.0)


def step_refinement_gap(curve: DiscreteCurve, dt: float) -> float:
    """Max vertex distance between one step of dt and two steps of dt/2."""
    full = backward_euler_step(curve, dt)
    halves = backward_euler_step(backward_euler_step(curve, dt / 2.0), dt / 2.0)
    return float(np.hypot(*(full.vertices - halves.vertices).T).max())


def _snapshot(
    step: int, time: float, curve: DiscreteCurve, dt: float, max_K: float
) -> FlowSnapshot:
    return FlowSnapshot(
        step=step, time=time, curve=curve, dt_used=dt, max_K=max_K, box=bounding_box(curve)
    )


def evolve(
    initial: DiscreteCurve,
    config: SolverConfig | None = None,
    halt_when: HaltPredicate | None = None,
    label: str = "",
) -> Trajectory:
    """Run the flow until the step size underflows, a limit is hit, or ``halt_when`` fires.

    Snapshots are kept at t = 0, every ``snapshot_stride`` steps, and at the
    final state. ``halt_when`` sees each recorded snapshot.
    """
    config = config or SolverConfig()
    curve = initial
    time = 0.0
    dt = adaptive_dt(curve, config)
    snapshots = [_snapshot(0, time, curve, dt, 0.0)]
    logger.info("evolving %s with N=%d", label or "curve", curve.n_points)

    stop = StopReason.MAX_STEPS
    step = 0
    last_K = 0.0
    last_dt = dt
    if halt_when is not None and halt_when(snapshots[0]):
        stop = StopReason.HALTED
    while stop == StopReason.MAX_STEPS and step < config.max_steps:
        dt = adaptive_dt(curve, config)
        if dt < config.dt_min:
            stop = StopReason.DT_UNDERFLOW
            break
        try:
            coefficients = step_coefficients(curve, dt)
            curve = backward_euler_step(curve, dt, coefficients)
        except (
            DegenerateSegmentError,
            IllConditionedError,
            NumericalFailureError,
            ValidationError,
        ) as exc:
            logger.warning("numerical failure at t=%.6g after %d steps: %s", time, step, exc)
            stop = StopReason.NUMERICAL_FAILURE
            break
        step += 1
        time += dt
        last_K = coefficients.max_K
        last_dt = dt
        if step % config.snapshot_stride == 0:
            snapshot = _snapshot(step, time, curve, dt, last_K)
            snapshots.append(snapshot)
            logger.debug("t=%.6g dt=%.3e maxK=%.3e", time, dt, last_K)
            if halt_when is not None and halt_when(snapshot):
                stop = StopReason.HALTED

    if snapshots[-1].step != step:
        snapshots.append(_snapshot(step, time, curve, last_dt, last_K))
    logger.info("stopped (%s) at t=%.8g after %d steps", stop, time, step)
    return Trajectory(snapshots=snapshots, stop_reason=stop, config=config, steps=step, label=label)
