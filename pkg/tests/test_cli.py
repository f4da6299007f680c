"""Tests for the command-line interface."""

import json
from pathlib import Path

import numpy as np
import pytest

from csf.cli import SUMMARY_FILE, main
from csf.utils.export import METADATA_FILE

CIRCLE_FLAGS = ["--family", "circle", "--n-points", "64", "--expected-n", "1"]


@pytest.fixture
def circle_run(tmp_path: Path) -> Path:
    """A circle evolved to extinction and exported."""
    config = tmp_path / "circle.json"
    config.write_text(
        json.dumps(
            {
                "family": "circle",
                "radius": 0.5,
                "n_points": 64,
                "expected_n": 1,
                "output_dir": str(tmp_path / "circle"),
            }
        ),
        encoding="utf-8",
    )
    assert main(["run", "--config", str(config)]) == 0
    return tmp_path / "circle"


class TestRun:
    """Test the run command."""

    def test_run_writes_summary(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a run exports its trajectory and a summary."""
        out = tmp_path / "run"

        code = main(["run", *CIRCLE_FLAGS, "--max-steps", "20", "--out", str(out)])

        assert code == 0
        summary = json.loads((out / SUMMARY_FILE).read_text(encoding="utf-8"))
        assert summary["steps"] == 20
        assert summary["stop_reason"] == "max_steps"
        assert summary["provenance"]["n_points"] == 64
        assert (out / METADATA_FILE).exists()
        assert json.loads(capsys.readouterr().out) == summary

    def test_flags_override_config_file(self, tmp_path: Path) -> None:
        """Test that command-line flags win over the file."""
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps({"family": "circle", "n_points": 64, "max_steps": 50, "expected_n": 1}),
            encoding="utf-8",
        )
        out = tmp_path / "run"

        assert main(["run", "--config", str(config), "--max-steps", "5", "--out", str(out)]) == 0
        assert json.loads((out / SUMMARY_FILE).read_text(encoding="utf-8"))["steps"] == 5

    def test_circle_shrinks(self, circle_run: Path) -> None:
        summary = json.loads((circle_run / SUMMARY_FILE).read_text(encoding="utf-8"))

        assert summary["outcome"]["kind"] == "shrank_as_n_loop"
        assert summary["final_time"] == pytest.approx(0.125, rel=0.05)

    def test_invalid_lambda(self, tmp_path: Path) -> None:
        """Test that a parameter outside the family range fails cleanly."""
        argv = ["run", "--family", "l_lambda", "--lambda", "1.5", "--out", str(tmp_path)]

        assert main(argv) == 1


class TestBisect:
    """Test the bisect command."""

    def test_bracket_without_switch(self, tmp_path: Path) -> None:
        """Test that a bracket of embedded curves is refused."""
        argv = [
            "bisect",
            "--family",
            "trig_three_loop",
            "--lambda",
            "0.45",
            "--n-points",
            "200",
            "--snapshot-stride",
            "10",
            "--lambda-interval",
            "0.0",
            "0.01",
            "--out",
            str(tmp_path),
        ]

        assert main(argv) == 1


class TestAnalyze:
    """Test the analyze command."""

    def test_area_fit(self, circle_run: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that the whole-curve area of a circle falls at rate 2 pi."""
        capsys.readouterr()

        assert main(["analyze", str(circle_run), "--n", "1", "--selector", "whole_curve"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["area_fit"]["free_slope"] == pytest.approx(-2 * np.pi, rel=0.03)
        assert payload["area_rates"]
        assert "profile_fit" not in payload

    def test_missing_directory(self, tmp_path: Path) -> None:
        assert main(["analyze", str(tmp_path / "absent")]) == 1

    def test_embedded_curve_has_no_loop(self, circle_run: Path) -> None:
        """Test that fitting a loop of an embedded curve fails cleanly."""
        assert main(["analyze", str(circle_run), "--selector", "rightmost_loop"]) == 1


class TestPlot:
    """Test the plot command."""

    @pytest.mark.parametrize("mode", ["cartesian", "cs_rescaled"])
    def test_writes_svg(self, circle_run: Path, tmp_path: Path, mode: str) -> None:
        out = tmp_path / f"{mode}.svg"

        assert main(["plot", str(circle_run), "--out", str(out), "--mode", mode]) == 0
        assert out.read_text(encoding="utf-8").lstrip().startswith("<?xml")

    def test_selected_snapshots(self, circle_run: Path, tmp_path: Path) -> None:
        out = tmp_path / "some.svg"

        assert main(["plot", str(circle_run), "--out", str(out), "--snapshots", "0", "1"]) == 0
        assert out.exists()

    def test_malformed_snapshot(self, circle_run: Path, tmp_path: Path) -> None:
        """A corrupted CSV ends with an error code, not a traceback."""
        snapshot = sorted(circle_run.glob("snapshot_*.csv"))[0]
        snapshot.write_text("index,x,y\n0,0.5,not-a-number\n", encoding="utf-8")

        assert main(["plot", str(circle_run), "--out", str(tmp_path / "bad.svg")]) == 1
