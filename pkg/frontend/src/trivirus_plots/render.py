"""Figure assembly: per-virus color families, log time axis, target overlays."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import load_report_levels, load_trajectory

_LINE_STYLES = ["-", "--", "-.", ":"]


@dataclass
class PlotSpec:
    """What to render: input files, output target, axis mode.

    log_time plots time logarithmically; a t=0 first sample is shifted to
    the smallest positive sample time for display and noted under the
    figure. report_path, when given, overlays the converged target levels
    as dashed horizontal lines.
    """

    csv_path: str | Path
    output_path: str | Path
    title: str | None = None
    log_time: bool = True
    report_path: str | Path | None = None


def build_figure(spec: PlotSpec):
    """Build the matplotlib figure for a spec; returns (figure, axes).

    One line per virus/node pair (m*n total), colored by virus with line
    styles cycling over nodes; legend groups by virus.
    """
    traj = load_trajectory(spec.csv_path)
    levels = load_report_levels(spec.report_path) if spec.report_path else None

    times = traj.times.copy()
    shifted_note = None
    if spec.log_time and times[0] <= 0.0:
        positive = times[times > 0.0]
        if positive.size == 0:
            raise ValueError("log time axis requires at least one positive sample time")
        shifted_note = f"t = {traj.times[0]:g} sample displayed at t = {positive[0]:g}"
        times[0] = positive[0]

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for k in range(traj.m):
        color = colors[k % len(colors)]
        for i in range(traj.n):
            ax.plot(
                times,
                traj.values[:, k, i],
                color=color,
                linestyle=_LINE_STYLES[i % len(_LINE_STYLES)],
                linewidth=1.1,
                label=f"virus {k + 1}" if i == 0 else None,
            )
        if levels is not None and k < levels.shape[0]:
            for level in np.unique(np.round(levels[k], 12)):
                ax.axhline(level, color=color, linestyle=(0, (1, 3)), linewidth=0.8, alpha=0.7)

    if spec.log_time:
        ax.set_xscale("log")
    ax.set_xlabel("time" + (" (log scale)" if spec.log_time else ""))
    ax.set_ylabel("infected fraction")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="best", fontsize=9)
    if shifted_note:
        fig.text(0.01, 0.01, shifted_note, fontsize=7, color="gray")
    fig.tight_layout(rect=(0, 0.03, 1, 1) if shifted_note else None)
    return fig, ax


def render_trajectories(spec: PlotSpec) -> Path:
    """Render the figure file for a spec and return the output path.

    The output format follows the file extension; vector formats (pdf,
    svg) preserve publication fidelity, raster (png) is available on
    request.
    """
    fig, _ = build_figure(spec)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out
