"""Trajectory persistence: one JSON metadata file plus one CSV per snapshot."""

import csv
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ValidationError

from csf.models.curve import BoundingBox, DiscreteCurve
from csf.models.flow import FlowSnapshot, SolverConfig, StopReason, Trajectory

logger = logging.getLogger(__name__)

METADATA_FILE = "metadata.json"
CSV_HEADER = ("index", "x", "y")


class TrajectoryIOError(Exception):
    """Raised when a trajectory cannot be written or read."""

    pass


class SnapshotEntry(BaseModel):
    step: int
    time: float
    dt_used: float
    max_K: float
    box: BoundingBox
    file: str


class TrajectoryMetadata(BaseModel):
    label: str
    stop_reason: StopReason
    steps: int
    config: SolverConfig
    snapshots: list[SnapshotEntry]


def snapshot_filename(index: int) -> str:
    return f"snapshot_{index:05d}.csv"


def _write_vertices(path: Path, curve: DiscreteCurve) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for i, (x, y) in enumerate(curve.vertices):
            writer.writerow((i, f"{x:.17g}", f"{y:.17g}"))


def _read_vertices(path: Path) -> DiscreteCurve:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise TrajectoryIOError(f"{path}: expected header {','.join(CSV_HEADER)}")
        try:
            rows = [(float(x), float(y)) for _, x, y in reader]
        except ValueError as exc:
            raise TrajectoryIOError(f"{path}:{reader.line_num}: malformed row: {exc}") from exc
    return DiscreteCurve(vertices=np.array(rows))


def export_trajectory(trajectory: Trajectory, directory: Path) -> list[Path]:
    """Write ``metadata.json`` and ``snapshot_NNNNN.csv`` files; returns the paths written.

    Output bytes depend only on the trajectory.
    """
    directory = Path(directory)
    written: list[Path] = []
    entries = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for k, snapshot in enumerate(trajectory.snapshots):
            path = directory / snapshot_filename(k)
            _write_vertices(path, snapshot.curve)
            written.append(path)
            entries.append(
                SnapshotEntry(
                    step=snapshot.step,
                    time=snapshot.time,
                    dt_used=snapshot.dt_used,
                    max_K=snapshot.max_K,
                    box=snapshot.box,
                    file=path.name,
                )
            )
        metadata = TrajectoryMetadata(
            label=trajectory.label,
            stop_reason=trajectory.stop_reason,
            steps=trajectory.steps,
            config=trajectory.config,
            snapshots=entries,
        )
        meta_path = directory / METADATA_FILE
        meta_path.write_text(metadata.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise TrajectoryIOError(f"{exc.filename or directory}: {exc.strerror or exc}") from exc
    logger.info("exported %d snapshots to %s", len(entries), directory)
    return [meta_path, *written]


def import_trajectory(directory: Path) -> Trajectory:
    """Read back a directory written by :func:`export_trajectory`."""
    directory = Path(directory)
    meta_path = directory / METADATA_FILE
    try:
        metadata = TrajectoryMetadata.model_validate_json(meta_path.read_text(encoding="utf-8"))
        snapshots = [
            FlowSnapshot(
                step=entry.step,
                time=entry.time,
                curve=_read_vertices(directory / entry.file),
                dt_used=entry.dt_used,
                max_K=entry.max_K,
                box=entry.box,
            )
            for entry in metadata.snapshots
        ]
    except OSError as exc:
        raise TrajectoryIOError(f"{exc.filename or directory}: {exc.strerror or exc}") from exc
    except ValidationError as exc:
        raise TrajectoryIOError(f"{directory}: invalid trajectory data: {exc}") from exc
    return Trajectory(
        snapshots=snapshots,
        stop_reason=metadata.stop_reason,
        config=metadata.config,
        steps=metadata.steps,
        label=metadata.label,
    )
