"""Command-line interface: run, bisect, analyze, plot and serve."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

from csf import __version__
from csf.config import load_experiment_config, settings
from csf.models.experiment import ExperimentConfig
from csf.services.analysis import (
    SELECTORS,
    DegenerateBoxError,
    FitUnreliableError,
    NotGraphLikeError,
    area_rates,
    estimate_T,
    fit_profile,
    zero_ratio_history,
)
from csf.services.experiment import BracketInvalidError, ExperimentService
from csf.services.families import FamilyParameterError
from csf.utils.export import TrajectoryIOError, export_trajectory, import_trajectory
from csf.utils.plotting import PlotMode, render_plot

logger = logging.getLogger("csf")

REPORT_FILE = "report.json"
SUMMARY_FILE = "summary.json"


def _dump(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _jsonable(model: BaseModel | None) -> Any:
    return None if model is None else model.model_dump(mode="json", by_alias=True)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON experiment config file")
    parser.add_argument("--family", help="initial curve family")
    parser.add_argument("--lambda", dest="lambda_", type=float, help="family parameter")
    parser.add_argument("--n-points", type=int, help="number of polygon vertices")
    parser.add_argument("--k-cap", type=float, help="cap on the step coefficients K_i")
    parser.add_argument("--dt-min", type=float, help="stop once the step falls below this")
    parser.add_argument("--dt-max", type=float, help="largest time step")
    parser.add_argument("--snapshot-stride", type=int, help="steps between snapshots")
    parser.add_argument("--max-steps", type=int, help="step limit")
    parser.add_argument("--expected-n", type=int, help="loop count n of the target solution")
    parser.add_argument("--out", type=Path, help="output directory")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "family": args.family,
        "lambda": args.lambda_,
        "n_points": args.n_points,
        "k_cap": args.k_cap,
        "dt_min": args.dt_min,
        "dt_max": args.dt_max,
        "snapshot_stride": args.snapshot_stride,
        "max_steps": args.max_steps,
        "expected_n": args.expected_n,
        "output_dir": args.out,
    }
    for name in ("lambda_interval", "bisect_tol", "parallel_probes"):
        overrides[name] = getattr(args, name, None)
    config = load_experiment_config(args.config, overrides)
    if args.out is None and args.config is None:
        config = config.model_copy(update={"output_dir": settings.output_dir})
    return config


def command_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    service = ExperimentService(config)
    trajectory = service.run()
    outcome = service.classify(trajectory)
    export_trajectory(trajectory, config.output_dir)
    summary = {
        "outcome": _jsonable(outcome),
        "stop_reason": str(trajectory.stop_reason),
        "steps": trajectory.steps,
        "final_time": trajectory.final.time,
        "final_box": _jsonable(trajectory.final.box),
        "provenance": _jsonable(service.provenance()),
    }
    (config.output_dir / SUMMARY_FILE).write_text(_dump(summary) + "\n", encoding="utf-8")
    print(_dump(summary))
    return 0


def command_bisect(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = ExperimentService(config).bisect()
    config.output_dir.mkdir(parents=True, exist_ok=True)
    report = result.report.model_dump_json(indent=2, by_alias=True)
    (config.output_dir / REPORT_FILE).write_text(report + "\n", encoding="utf-8")
    if result.best is not None:
        export_trajectory(result.best, config.output_dir / "best")
    print(report)
    return 0


def command_analyze(args: argparse.Namespace) -> int:
    trajectory = import_trajectory(args.directory)
    selector = SELECTORS[args.selector]
    area = estimate_T(trajectory, selector)
    T_est = args.T if args.T is not None else area.T_est
    payload: dict[str, Any] = {
        "area_fit": _jsonable(area),
        "area_rates": [_jsonable(r) for r in area_rates(trajectory, selector)],
    }
    if args.n >= 2:
        payload["profile_fit"] = _jsonable(fit_profile(trajectory, args.n, T_est))
        payload["zero_ratios"] = zero_ratio_history(trajectory, args.n, T_est)
    print(_dump(payload))
    return 0


def command_plot(args: argparse.Namespace) -> int:
    trajectory = import_trajectory(args.directory)
    snapshots = trajectory.snapshots
    if args.snapshots:
        chosen = [snapshots[i] for i in args.snapshots]
    elif args.mode == PlotMode.CS_RESCALED:
        chosen = snapshots[-1:]
    else:
        chosen = [snapshots[0], snapshots[-1]] if len(snapshots) > 1 else snapshots
    path = render_plot(chosen, args.out, PlotMode(args.mode), args.n)
    print(path)
    return 0


def command_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("csf.main:app", host=settings.host, port=settings.port, reload=settings.reload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csf", description=__doc__)
    parser.add_argument("--version", action="version", version=f"csf {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="evolve one curve and classify the outcome")
    _add_config_flags(run)
    run.set_defaults(handler=command_run)

    bisect = commands.add_parser("bisect", help="search lambda for a shrinking n-loop")
    _add_config_flags(bisect)
    bisect.add_argument("--lambda-interval", type=float, nargs=2, metavar=("LOW", "HIGH"))
    bisect.add_argument("--bisect-tol", type=float)
    bisect.add_argument("--parallel-probes", type=int)
    bisect.set_defaults(handler=command_bisect)

    analyze = commands.add_parser("analyze", help="fit asymptotics of a stored trajectory")
    analyze.add_argument("directory", type=Path)
    analyze.add_argument("--n", type=int, default=3, help="loop count")
    analyze.add_argument("--T", type=float, help="singular time (fitted when omitted)")
    analyze.add_argument("--selector", choices=sorted(SELECTORS), default="rightmost_loop")
    analyze.set_defaults(handler=command_analyze)

    plot = commands.add_parser("plot", help="render stored snapshots as SVG")
    plot.add_argument("directory", type=Path)
    plot.add_argument("--out", type=Path, required=True)
    plot.add_argument("--mode", choices=[m.value for m in PlotMode], default="cartesian")
    plot.add_argument("--n", type=int, default=3, help="loop count for the reference curve")
    plot.add_argument("--snapshots", type=int, nargs="*", help="snapshot indices to draw")
    plot.set_defaults(handler=command_plot)

    serve = commands.add_parser("serve", help="run the HTTP API")
    serve.set_defaults(handler=command_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return int(args.handler(args))
    except (
        ValidationError,
        FamilyParameterError,
        BracketInvalidError,
        TrajectoryIOError,
        NotGraphLikeError,
        FitUnreliableError,
        DegenerateBoxError,
        OSError,
    ) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
