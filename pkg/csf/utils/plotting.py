"""Static SVG figures of flow snapshots."""

import logging
from collections.abc import Sequence
from enum import StrEnum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib import rc_context  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from csf.models.flow import FlowSnapshot  # noqa: E402
from csf.services.analysis import cs_rescale  # noqa: E402

logger = logging.getLogger(__name__)


class PlotMode(StrEnum):
    CARTESIAN = "cartesian"
    CS_RESCALED = "cs_rescaled"


def build_figure(
    snapshots: Sequence[FlowSnapshot], mode: PlotMode = PlotMode.CARTESIAN, n: int = 3
) -> Figure:
    """One closed polyline per snapshot; the rescaled view adds y = +-xi^(n-1)."""
    if not snapshots:
        raise ValueError("nothing to plot")
    figure = Figure(figsize=(6, 6))
    axes = figure.add_subplot()
    colors = matplotlib.colormaps["viridis"](np.linspace(0.0, 0.9, len(snapshots)))
    for snapshot, color in zip(snapshots, colors, strict=True):
        curve = snapshot.curve if mode == PlotMode.CARTESIAN else cs_rescale(snapshot.curve)
        closed = np.vstack([curve.vertices, curve.vertices[:1]])
        axes.plot(
            closed[:, 0], closed[:, 1], color=color, lw=1.0, label=f"t = {snapshot.time:.6g}"
        )

    if mode == PlotMode.CS_RESCALED:
        xi = np.linspace(-1.0, 1.0, 201)
        reference = xi ** (n - 1)
        axes.plot(xi, reference, "k--", lw=0.8, label=f"$\\xi^{{{n - 1}}}$")
        axes.plot(xi, -reference, "k--", lw=0.8)
        axes.set_xlim(-1.05, 1.05)
        axes.set_ylim(-1.05, 1.05)
        axes.set_xlabel(r"$\xi = x / a(t)$")
        axes.set_ylabel(r"$u_{CS}$")
    else:
        axes.set_aspect("equal")
        axes.set_xlabel("x")
        axes.set_ylabel("y")
    axes.legend(loc="upper right", fontsize="small")
    return figure


def render_plot(
    snapshots: Sequence[FlowSnapshot],
    path: Path,
    mode: PlotMode = PlotMode.CARTESIAN,
    n: int = 3,
) -> Path:
    """Write a standalone SVG; identical input gives identical bytes."""
    figure = build_figure(snapshots, mode, n)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with rc_context({"svg.hashsalt": "csf", "svg.fonttype": "path"}):
        figure.savefig(path, format="svg", metadata={"Date": None})
    logger.info("wrote %s", path)
    return path
