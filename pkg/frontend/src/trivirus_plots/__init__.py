"""Trajectory figure rendering for multi-virus SIS simulation output.

Consumes only the file interfaces of the simulation package: the
trajectory CSV (header ``t,x1_1,...,xm_n``) and the JSON simulation
report. No dynamics are ever re-derived here.
"""

__version__ = "0.1.0"

from .io import MalformedCsv, MalformedReport, TrajectoryData, load_report_levels, load_trajectory
from .render import PlotSpec, build_figure, render_trajectories

__all__ = [
    "MalformedCsv",
    "MalformedReport",
    "PlotSpec",
    "TrajectoryData",
    "build_figure",
    "load_report_levels",
    "load_trajectory",
    "render_trajectories",
]
