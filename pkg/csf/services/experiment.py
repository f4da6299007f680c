"""Flow runs, outcome classification and the lambda bisection."""

import logging
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor

from pydantic import BaseModel, ConfigDict

from csf import __version__
from csf.models.curve import BoundingBox, CurveTopology, DiscreteCurve
from csf.models.experiment import (
    ExperimentConfig,
    ExperimentReport,
    Outcome,
    OutcomeKind,
    ProbeResult,
    ProfileFit,
    Provenance,
)
from csf.models.flow import FlowSnapshot, StopReason, Trajectory
from csf.services.analysis import (
    DegenerateBoxError,
    FitUnreliableError,
    NotGraphLikeError,
    fit_profile,
)
from csf.services.families import build_curve
from csf.services.geometry import bounding_box, self_intersections
from csf.services.solver import HaltPredicate, evolve
from csf.services.topology import TriplePointError, analyze_topology

logger = logging.getLogger(__name__)

SHRINK_FRACTION = 0.05

Probe = Callable[[float], ProbeResult]
Mapper = Callable[[Probe, Iterable[float]], Iterator[ProbeResult]]


class BracketInvalidError(Exception):
    """Raised when both ends of a lambda bracket land in the same outcome class."""

    pass


def default_shrink_eps(curve: DiscreteCurve) -> float:
    return SHRINK_FRACTION * bounding_box(curve).diameter


def halt_on_lost_intersections(expected_n: int) -> HaltPredicate:
    """Stop a run once fewer than n - 1 crossings remain."""

    def predicate(snapshot: FlowSnapshot) -> bool:
        return len(self_intersections(snapshot.curve)) < expected_n - 1

    return predicate


class _EyeEarTracker:
    """Largest eye area over smallest ear area across snapshots."""

    def __init__(self) -> None:
        self.max_ratio: float | None = None
        self.exceeded = False
        self.exceeded_twice = False

    def update(self, topology: CurveTopology) -> None:
        eyes, ears = topology.eyes(), topology.loops()
        if not eyes or not ears:
            return
        eye = max(r.area for r in eyes)
        ear = min(r.area for r in ears)
        if ear <= 0:
            return
        ratio = eye / ear
        self.max_ratio = ratio if self.max_ratio is None else max(self.max_ratio, ratio)
        self.exceeded |= eye > ear
        self.exceeded_twice |= eye > 2.0 * ear

    def outcome(
        self,
        kind: OutcomeKind,
        n: int | None = None,
        at_time: float | None = None,
        final_box: BoundingBox | None = None,
        reason: str | None = None,
    ) -> Outcome:
        return Outcome(
            kind=kind,
            n=n,
            at_time=at_time,
            final_box=final_box,
            reason=reason,
            max_eye_ear_ratio=self.max_ratio,
            eye_exceeded_ear=self.exceeded,
            eye_exceeded_twice_ear=self.exceeded_twice,
        )


def loop_collapsed_first(topology: CurveTopology, expected_n: int) -> bool:
    """Whether a loop, rather than an eye, is the region about to vanish.

    Read off the last snapshot that still had all its crossings. An n-loop
    has two loops and n - 2 eyes; a region too thin to resolve is missing
    from the decomposition, otherwise the smallest region is the one going.
    """
    loops, eyes = topology.loops(), topology.eyes()
    if len(eyes) < expected_n - 2:
        return False
    if len(loops) < 2 or not eyes:
        return True
    return min(r.area for r in loops) < min(r.area for r in eyes)


def classify(trajectory: Trajectory, expected_n: int, shrink_eps: float) -> Outcome:
    """Sort a trajectory into one outcome class.

    Checked in snapshot order: a triple point or a drop below n - 1 crossings
    ends the scan. A drop after the curve already fit inside shrink_eps is a
    shrinking n-loop running out of resolution. Otherwise a drop caused by a
    collapsing eye means the curve is becoming embedded, and one caused by a
    collapsing loop is a singularity that keeps the eyes. Without a drop the
    stop reason and final box decide.
    """
    if not trajectory.snapshots:
        return Outcome(kind=OutcomeKind.INCONCLUSIVE, reason="empty trajectory")
    required = expected_n - 1
    tracker = _EyeEarTracker()
    above_expected = False
    previous: FlowSnapshot | None = None
    previous_topology: CurveTopology | None = None
    for snapshot in trajectory.snapshots:
        try:
            topology = snapshot.topology or analyze_topology(snapshot.curve)
        except TriplePointError:
            return tracker.outcome(OutcomeKind.TRIPLE_POINT_EVENT, at_time=snapshot.time)
        count = len(topology.intersections)
        if count < required:
            if previous is None or previous_topology is None:
                return tracker.outcome(OutcomeKind.LOST_INTERSECTIONS, at_time=snapshot.time)
            if previous.box.diameter < shrink_eps and not above_expected:
                return tracker.outcome(
                    OutcomeKind.SHRANK_AS_N_LOOP, n=expected_n, at_time=previous.time
                )
            if loop_collapsed_first(previous_topology, expected_n):
                return tracker.outcome(
                    OutcomeKind.SINGULAR_NOT_POINT,
                    at_time=snapshot.time,
                    final_box=snapshot.box,
                    reason="a loop collapsed while the eyes remained",
                )
            return tracker.outcome(OutcomeKind.LOST_INTERSECTIONS, at_time=snapshot.time)
        above_expected |= count > required
        tracker.update(topology)
        previous, previous_topology = snapshot, topology

    final = trajectory.final
    if above_expected:
        return tracker.outcome(
            OutcomeKind.INCONCLUSIVE, reason="intersection count above expected"
        )
    if trajectory.stop_reason != StopReason.DT_UNDERFLOW:
        return tracker.outcome(
            OutcomeKind.INCONCLUSIVE, reason=f"run stopped: {trajectory.stop_reason}"
        )
    if final.box.diameter < shrink_eps:
        return tracker.outcome(OutcomeKind.SHRANK_AS_N_LOOP, n=expected_n, at_time=final.time)
    return tracker.outcome(
        OutcomeKind.SINGULAR_NOT_POINT, at_time=final.time, final_box=final.box
    )


def bisect_outcomes(
    low: float,
    high: float,
    tol: float,
    probe: Probe,
    parallel_probes: int = 1,
    mapper: Mapper = map,
) -> tuple[list[ProbeResult], tuple[float, float]]:
    """Narrow [low, high] to the switch between lost and persisting crossings.

    Each refinement probes ``parallel_probes`` equally spaced interior points,
    through ``mapper`` so they may run concurrently, and keeps the
    sub-interval where the class changes. Returns every probe and the final
    bracket.
    """
    ends = list(mapper(probe, [low, high]))
    results = list(ends)
    low_lost, high_lost = ends[0].lost, ends[1].lost
    if low_lost == high_lost:
        raise BracketInvalidError(
            f"lambda={low} and lambda={high} are both "
            f"{'lost' if low_lost else 'persisting'}: {ends[0].outcome.kind}, "
            f"{ends[1].outcome.kind}"
        )
    while high - low > tol:
        step = (high - low) / (parallel_probes + 1)
        points = [low + step * (k + 1) for k in range(parallel_probes)]
        probes = list(mapper(probe, points))
        results.extend(probes)
        for result in probes:
            if result.outcome.kind == OutcomeKind.INCONCLUSIVE:
                logger.warning(
                    "inconclusive probe at lambda=%.8f counted as persisting: %s",
                    result.lambda_,
                    result.outcome.reason,
                )
        xs = [low, *points, high]
        sides = [low_lost, *(p.lost for p in probes), high_lost]
        for k in range(len(xs) - 1):
            if sides[k] != sides[k + 1]:
                low, high = xs[k], xs[k + 1]
                low_lost, high_lost = sides[k], sides[k + 1]
                break
        logger.info("bracket [%.8f, %.8f]", low, high)
    return results, (low, high)


def best_probe(results: list[ProbeResult]) -> ProbeResult | None:
    """Persisting-class probe with the smallest final box."""
    persisting = [r for r in results if not r.lost]
    return min(persisting, key=lambda r: r.final_box.diameter) if persisting else None


class BisectionResult(BaseModel):
    """lambda* with its report and the rerun at lambda*."""

    model_config = ConfigDict(frozen=True)

    lambda_star: float
    report: ExperimentReport
    best: Trajectory | None


class ExperimentService:
    """Runs and classifies flows of one configured curve family."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config

    def initial_curve(self, lam: float | None = None) -> DiscreteCurve:
        spec = self.config.family if lam is None else self.config.family.with_lambda(lam)
        return build_curve(spec)

    def shrink_eps(self, initial: DiscreteCurve) -> float:
        return self.config.shrink_eps or default_shrink_eps(initial)

    def run(self, lam: float | None = None, halt_on_loss: bool = False) -> Trajectory:
        initial = self.initial_curve(lam)
        halt = halt_on_lost_intersections(self.config.expected_n) if halt_on_loss else None
        label = f"{self.config.family.family}"
        if lam is not None or self.config.family.lambda_ is not None:
            label += f" lambda={lam if lam is not None else self.config.family.lambda_}"
        return evolve(initial, self.config.solver, halt_when=halt, label=label)

    def classify(self, trajectory: Trajectory) -> Outcome:
        eps = self.shrink_eps(trajectory.snapshots[0].curve)
        return classify(trajectory, self.config.expected_n, eps)

    def probe(self, lam: float) -> ProbeResult:
        trajectory = self.run(lam, halt_on_loss=True)
        outcome = self.classify(trajectory)
        logger.info("lambda=%.8f -> %s", lam, outcome.kind)
        final = trajectory.final
        return ProbeResult(
            lambda_=lam,
            outcome=outcome,
            stop_reason=trajectory.stop_reason,
            final_time=final.time,
            final_box=final.box,
        )

    def analyze(self, trajectory: Trajectory) -> ProfileFit | None:
        """Profile fit, or None when the trajectory does not support one."""
        try:
            return fit_profile(trajectory, self.config.expected_n)
        except (NotGraphLikeError, FitUnreliableError, DegenerateBoxError) as exc:
            logger.warning("profile fit skipped: %s", exc)
            return None

    def provenance(self) -> Provenance:
        solver = self.config.solver
        return Provenance(
            family=str(self.config.family.family),
            n_points=self.config.family.n_points,
            k_cap=solver.k_cap,
            dt_min=solver.dt_min,
            dt_max=solver.dt_max,
            snapshot_stride=solver.snapshot_stride,
            code_version=__version__,
            lambda_interval=self.config.lambda_interval,
            bisect_tol=self.config.bisect_tol,
        )

    def bisect(self) -> BisectionResult:
        low, high = self.config.lambda_interval
        parallel = self.config.parallel_probes
        if parallel > 1:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                results, bracket = bisect_outcomes(
                    low, high, self.config.bisect_tol, self.probe, parallel, pool.map
                )
        else:
            results, bracket = bisect_outcomes(low, high, self.config.bisect_tol, self.probe)

        best = best_probe(results)
        lambda_star = best.lambda_ if best is not None else sum(bracket) / 2.0
        trajectory = None
        profile = None
        if best is not None:
            trajectory = self.run(lambda_star)
            if self.classify(trajectory).kind == OutcomeKind.SHRANK_AS_N_LOOP:
                profile = self.analyze(trajectory)
        report = ExperimentReport(
            outcomes=sorted(results, key=lambda r: r.lambda_),
            lambda_star=lambda_star,
            profile_fit=profile,
            provenance=self.provenance(),
        )
        logger.info("lambda* = %.8f", lambda_star)
        return BisectionResult(lambda_star=lambda_star, report=report, best=trajectory)


def bisect_lambda(config: ExperimentConfig, expected_n: int) -> tuple[float, ExperimentReport]:
    service = ExperimentService(config.model_copy(update={"expected_n": expected_n}))
    result = service.bisect()
    return result.lambda_star, result.report
