"""Tests for trajectory export and import."""

from pathlib import Path

import numpy as np
import pytest

from csf.models import SolverConfig, StopReason, Trajectory
from csf.services.families import ellipse
from csf.services.solver import evolve
from csf.utils.export import (
    METADATA_FILE,
    TrajectoryIOError,
    export_trajectory,
    import_trajectory,
    snapshot_filename,
)


@pytest.fixture(scope="module")
def short_run() -> Trajectory:
    return evolve(ellipse(1.0, 0.5, 64), SolverConfig(max_steps=30, snapshot_stride=10), label="e")


class TestExport:
    """Test the on-disk layout."""

    def test_files_written(self, short_run: Trajectory, tmp_path: Path) -> None:
        """Metadata first, then one CSV per snapshot."""
        paths = export_trajectory(short_run, tmp_path / "run")

        assert paths[0].name == METADATA_FILE
        assert [p.name for p in paths[1:]] == [snapshot_filename(k) for k in range(4)]
        assert all(p.exists() for p in paths)

    def test_csv_format(self, short_run: Trajectory, tmp_path: Path) -> None:
        """Header index,x,y with LF endings and one row per vertex."""
        paths = export_trajectory(short_run, tmp_path)
        raw = paths[1].read_bytes()

        assert raw.startswith(b"index,x,y\n")
        assert b"\r" not in raw
        assert len(raw.splitlines()) == 65

    def test_deterministic_bytes(self, short_run: Trajectory, tmp_path: Path) -> None:
        """Exporting twice gives identical files."""
        first = export_trajectory(short_run, tmp_path / "a")
        second = export_trajectory(short_run, tmp_path / "b")

        for a, b in zip(first, second, strict=True):
            assert a.read_bytes() == b.read_bytes()

    def test_unwritable_target(self, short_run: Trajectory, tmp_path: Path) -> None:
        """A file where the directory should be is an IO error."""
        blocker = tmp_path / "taken"
        blocker.write_text("", encoding="utf-8")

        with pytest.raises(TrajectoryIOError):
            export_trajectory(short_run, blocker)


class TestImport:
    """Test reading trajectories back."""

    def test_round_trip(self, short_run: Trajectory, tmp_path: Path) -> None:
        """Vertices survive bit for bit, metadata field by field."""
        export_trajectory(short_run, tmp_path)
        loaded = import_trajectory(tmp_path)

        assert loaded.stop_reason == short_run.stop_reason == StopReason.MAX_STEPS
        assert loaded.steps == 30
        assert loaded.label == "e"
        assert loaded.config == short_run.config
        np.testing.assert_array_equal(loaded.times, short_run.times)
        for got, want in zip(loaded.snapshots, short_run.snapshots, strict=True):
            np.testing.assert_array_equal(got.curve.vertices, want.curve.vertices)
            assert got.box == want.box

    def test_empty_trajectory(self, tmp_path: Path) -> None:
        """A run with no snapshots still round-trips."""
        empty = Trajectory(snapshots=[], stop_reason=StopReason.NUMERICAL_FAILURE)

        assert export_trajectory(empty, tmp_path) == [tmp_path / METADATA_FILE]
        assert import_trajectory(tmp_path).snapshots == []

    def test_missing_directory(self, tmp_path: Path) -> None:
        """Nothing to read is an IO error."""
        with pytest.raises(TrajectoryIOError):
            import_trajectory(tmp_path / "absent")

    def test_bad_header(self, short_run: Trajectory, tmp_path: Path) -> None:
        """A CSV without the expected header is refused."""
        paths = export_trajectory(short_run, tmp_path)
        paths[1].write_text("i,x,y\n0,1,0\n", encoding="utf-8")

        with pytest.raises(TrajectoryIOError):
            import_trajectory(tmp_path)

    @pytest.mark.parametrize("row", ["0,1.0,abc", "0,1.0", "0,1.0,2.0,3.0"])
    def test_malformed_row(self, short_run: Trajectory, tmp_path: Path, row: str) -> None:
        """A row that does not parse names the file it came from."""
        paths = export_trajectory(short_run, tmp_path)
        paths[1].write_text(f"index,x,y\n{row}\n", encoding="utf-8")

        with pytest.raises(TrajectoryIOError, match=paths[1].name):
            import_trajectory(tmp_path)

    def test_corrupt_metadata(self, short_run: Trajectory, tmp_path: Path) -> None:
        """Malformed metadata is reported as an IO error."""
        export_trajectory(short_run, tmp_path)
        (tmp_path / METADATA_FILE).write_text('{"label": 1}', encoding="utf-8")

        with pytest.raises(TrajectoryIOError):
            import_trajectory(tmp_path)
