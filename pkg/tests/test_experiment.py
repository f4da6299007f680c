"""Tests for outcome classification and the lambda bisection."""

import pytest
from pydantic import ValidationError

from csf.models import (
    BoundingBox,
    CurveTopology,
    DiscreteCurve,
    ExperimentConfig,
    ExperimentReport,
    FamilyName,
    FamilySpec,
    FlowSnapshot,
    Outcome,
    OutcomeKind,
    ProbeResult,
    SolverConfig,
    StopReason,
    Trajectory,
)
from csf.services import experiment
from csf.services.experiment import (
    BisectionResult,
    BracketInvalidError,
    ExperimentService,
    Probe,
    best_probe,
    bisect_lambda,
    bisect_outcomes,
    classify,
    default_shrink_eps,
    loop_collapsed_first,
)
from csf.services.families import circle, ellipse, figure_eight, l_lambda, trig_three_loop
from csf.services.geometry import bounding_box
from csf.services.solver import evolve
from csf.services.topology import TriplePointError, analyze_topology


def fake_probe(switch: float, persisting: OutcomeKind = OutcomeKind.SHRANK_AS_N_LOOP) -> Probe:
    """Probe that loses its crossings below ``switch``."""

    def probe(lam: float) -> ProbeResult:
        kind = OutcomeKind.LOST_INTERSECTIONS if lam < switch else persisting
        return ProbeResult(
            lambda_=lam,
            outcome=Outcome(kind=kind),
            stop_reason=StopReason.DT_UNDERFLOW,
            final_time=0.1,
            final_box=BoundingBox(x_min=0.0, x_max=lam, y_min=0.0, y_max=0.0),
        )

    return probe


def trig_config(lam: float = 0.45, **solver: float) -> ExperimentConfig:
    family = FamilySpec(family=FamilyName.TRIG_THREE_LOOP, lambda_=lam, n_points=200)
    return ExperimentConfig(family=family, solver=SolverConfig(**solver))


def halted_run(*curves: DiscreteCurve) -> Trajectory:
    """Hand-built snapshots of a run stopped once crossings were lost."""
    snapshots = [
        FlowSnapshot(step=k, time=0.01 * k, curve=c, dt_used=1e-4, max_K=0.0, box=bounding_box(c))
        for k, c in enumerate(curves)
    ]
    return Trajectory(snapshots=snapshots, stop_reason=StopReason.HALTED)


class TestClassify:
    """Test each outcome class."""

    def test_circle_shrinks(self) -> None:
        """An embedded circle is a shrinking 1-loop."""
        initial = circle(0.2, 100)
        run = evolve(initial)
        outcome = classify(run, 1, default_shrink_eps(initial))

        assert outcome.kind == OutcomeKind.SHRANK_AS_N_LOOP
        assert outcome.n == 1
        assert outcome.at_time == pytest.approx(0.02, rel=0.05)

    def test_small_eye_is_lost(self) -> None:
        """L_lambda with a tiny eye loses both crossings early."""
        family = FamilySpec(family=FamilyName.L_LAMBDA, lambda_=0.05, n_points=1000)
        config = ExperimentConfig(family=family, solver=SolverConfig(snapshot_stride=5))
        service = ExperimentService(config)

        run = service.run(halt_on_loss=True)
        outcome = service.classify(run)

        assert run.stop_reason == StopReason.HALTED
        assert outcome.kind == OutcomeKind.LOST_INTERSECTIONS
        assert outcome.at_time is not None and outcome.at_time < 0.01
        assert outcome.intersections_lost

    def test_collapsing_ear_is_singular(self) -> None:
        """Crossings lost to a vanishing ear leave the eye behind: not a point."""
        run = halted_run(l_lambda(0.95, 400), ellipse(1.0, 0.5, 400))
        outcome = classify(run, 3, 0.1)

        assert outcome.kind == OutcomeKind.SINGULAR_NOT_POINT
        assert outcome.at_time == pytest.approx(0.01)
        assert outcome.final_box is not None
        assert not outcome.intersections_lost

    def test_collapsing_eye_is_lost(self) -> None:
        """Crossings lost to a vanishing eye mean the curve became embedded."""
        run = halted_run(l_lambda(0.2, 400), ellipse(1.0, 0.5, 400))

        assert classify(run, 3, 0.1).kind == OutcomeKind.LOST_INTERSECTIONS

    def test_drop_below_shrink_eps_is_shrinking(self) -> None:
        """Crossings that vanish only once the curve is tiny were kept to the end."""
        tiny = DiscreteCurve(vertices=l_lambda(0.95, 400).vertices * 0.01)
        gone = DiscreteCurve(vertices=ellipse(1.0, 0.5, 400).vertices * 0.005)
        outcome = classify(halted_run(tiny, gone), 3, 0.1)

        assert outcome.kind == OutcomeKind.SHRANK_AS_N_LOOP
        assert outcome.n == 3
        assert outcome.at_time == 0.0

    def test_smallest_region_decides(self) -> None:
        """Small ears against a large eye, and the other way round."""
        big_eye = analyze_topology(l_lambda(0.95, 400))
        small_eye = analyze_topology(l_lambda(0.2, 400))

        assert loop_collapsed_first(big_eye, 3)
        assert not loop_collapsed_first(small_eye, 3)

    def test_unresolved_eye_counts_as_lost(self) -> None:
        """A three-loop missing its eye lost the eye, whatever the loops look like."""
        topology = analyze_topology(l_lambda(0.95, 400))
        without_eye = topology.model_copy(update={"regions": topology.loops()})

        assert not loop_collapsed_first(without_eye, 3)

    def test_figure_eight_can_only_lose_a_loop(self) -> None:
        """A 2-loop has no eye to lose."""
        assert loop_collapsed_first(analyze_topology(figure_eight(200)), 2)

    def test_triple_point(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """A triple point ends the scan at the first snapshot showing it."""

        def raise_triple(curve: DiscreteCurve) -> CurveTopology:
            raise TriplePointError("three branches meet")

        run = evolve(circle(1.0, 100), SolverConfig(max_steps=5))
        monkeypatch.setattr(experiment, "analyze_topology", raise_triple)

        outcome = classify(run, 1, 0.1)

        assert outcome.kind == OutcomeKind.TRIPLE_POINT_EVENT
        assert outcome.at_time == 0.0

    def test_step_limit_is_inconclusive(self) -> None:
        """A run cut off by max_steps says nothing."""
        run = evolve(circle(1.0, 100), SolverConfig(max_steps=10))
        outcome = classify(run, 1, 0.1)

        assert outcome.kind == OutcomeKind.INCONCLUSIVE
        assert outcome.reason is not None and outcome.reason.startswith("run stopped")

    def test_too_many_crossings(self) -> None:
        """More crossings than n - 1 is reported, not classified."""
        run = evolve(figure_eight(200), SolverConfig(max_steps=10))
        outcome = classify(run, 1, 0.1)

        assert outcome.kind == OutcomeKind.INCONCLUSIVE
        assert outcome.reason == "intersection count above expected"

    def test_singular_not_point(self) -> None:
        """Underflow with a large box means the curve did not shrink to a point."""
        run = evolve(circle(1.0, 100), SolverConfig(max_steps=1))
        stalled = Trajectory(snapshots=run.snapshots[:1], stop_reason=StopReason.DT_UNDERFLOW)

        outcome = classify(stalled, 1, 0.01)

        assert outcome.kind == OutcomeKind.SINGULAR_NOT_POINT
        assert outcome.final_box is not None
        assert outcome.final_box.width == pytest.approx(2.0)

    def test_empty_trajectory(self) -> None:
        """Nothing recorded, nothing to say."""
        empty = Trajectory(snapshots=[], stop_reason=StopReason.NUMERICAL_FAILURE)

        assert classify(empty, 3, 0.1).kind == OutcomeKind.INCONCLUSIVE

    def test_eye_ear_ratio_recorded(self) -> None:
        """The largest eye over the smallest ear is tracked along the run."""
        run = evolve(trig_three_loop(0.45, 400), SolverConfig(max_steps=100, snapshot_stride=50))
        outcome = classify(run, 3, 0.1)

        assert outcome.max_eye_ear_ratio is not None
        assert outcome.max_eye_ear_ratio > 0
        assert outcome.eye_exceeded_twice_ear <= outcome.eye_exceeded_ear


class TestBisection:
    """Test the bracket refinement."""

    @pytest.mark.parametrize("parallel", [1, 3])
    def test_converges_on_switch(self, parallel: int) -> None:
        """The final bracket straddles the switch and is narrower than tol."""
        results, (low, high) = bisect_outcomes(0.0, 1.0, 1e-3, fake_probe(0.5), parallel)

        assert low < 0.5 <= high
        assert high - low <= 1e-3
        assert len(results) > 2

    def test_inconclusive_counts_as_persisting(self) -> None:
        """Inconclusive probes sit on the persisting side."""
        probe = fake_probe(0.3, persisting=OutcomeKind.INCONCLUSIVE)
        _, (low, high) = bisect_outcomes(0.0, 1.0, 1e-3, probe)

        assert low < 0.3 <= high

    def test_same_class_at_both_ends(self) -> None:
        """A bracket that does not straddle a switch is refused."""
        with pytest.raises(BracketInvalidError):
            bisect_outcomes(0.6, 0.9, 1e-3, fake_probe(0.5))

    def test_best_probe(self) -> None:
        """The persisting probe with the smallest final box wins."""
        results, _ = bisect_outcomes(0.0, 1.0, 1e-3, fake_probe(0.5))
        best = best_probe(results)

        assert best is not None
        assert not best.lost
        assert best.lambda_ == min(r.lambda_ for r in results if not r.lost)

    def test_no_persisting_probe(self) -> None:
        """Only lost probes leave nothing to pick."""
        lost = fake_probe(2.0)

        assert best_probe([lost(0.1), lost(0.2)]) is None

    def test_bisection_of_real_flows(self) -> None:
        """L_lambda loses its eye near 0 and an ear near 1, so the bracket is valid."""
        family = FamilySpec(family=FamilyName.L_LAMBDA, lambda_=0.5, n_points=200)
        config = ExperimentConfig(
            family=family,
            solver=SolverConfig(snapshot_stride=2),
            lambda_interval=(0.05, 0.95),
        )
        service = ExperimentService(config)

        results, (low, high) = bisect_outcomes(0.05, 0.95, 0.3, service.probe)

        assert results[0].outcome.kind == OutcomeKind.LOST_INTERSECTIONS
        assert results[1].outcome.kind == OutcomeKind.SINGULAR_NOT_POINT
        assert high - low <= 0.3
        assert 0.05 <= low < high <= 0.95
        sides = {r.lambda_: r.lost for r in results}
        assert sides[low] and not sides[high]

    def test_service_rejects_embedded_bracket(self) -> None:
        """Below 1/3 the trigonometric curves are embedded, so both ends lose."""
        config = trig_config(snapshot_stride=10).model_copy(
            update={"lambda_interval": (0.0, 0.01)}
        )

        with pytest.raises(BracketInvalidError):
            ExperimentService(config).bisect()


class TestService:
    """Test the service wiring."""

    def test_probe_result(self) -> None:
        """A probe records the lambda, stop reason and final box of its run."""
        service = ExperimentService(trig_config(snapshot_stride=10, max_steps=20))
        result = service.probe(0.45)

        assert result.lambda_ == 0.45
        assert result.stop_reason == StopReason.MAX_STEPS
        assert result.outcome.kind == OutcomeKind.INCONCLUSIVE
        assert not result.lost

    def test_provenance(self) -> None:
        """Provenance repeats the configuration the runs used."""
        config = trig_config(dt_max=5e-5)
        provenance = ExperimentService(config).provenance()

        assert provenance.family == "trig_three_loop"
        assert provenance.n_points == 200
        assert provenance.dt_max == 5e-5
        assert provenance.lambda_interval == (0.40, 0.55)

    def test_explicit_shrink_eps(self) -> None:
        """A configured shrink_eps overrides the default fraction."""
        config = trig_config().model_copy(update={"shrink_eps": 1e-3})

        assert ExperimentService(config).shrink_eps(circle(1.0, 100)) == 1e-3

    def test_bisect_lambda(self) -> None:
        """The functional entry point refuses the same bracket."""
        config = trig_config(snapshot_stride=10).model_copy(
            update={"lambda_interval": (0.0, 0.01)}
        )

        with pytest.raises(BracketInvalidError):
            bisect_lambda(config, 3)

    def test_bisection_result_is_frozen(self) -> None:
        """Results are immutable values like every other model."""
        service = ExperimentService(trig_config())
        report = ExperimentReport(outcomes=[], provenance=service.provenance())
        result = BisectionResult(lambda_star=0.48, report=report, best=None)

        with pytest.raises(ValidationError):
            result.lambda_star = 0.5  # type: ignore[misc]
