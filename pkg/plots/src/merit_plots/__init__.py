"""Figure rendering for merit-dynamics experiment CSVs."""

from .io import (
    ResultTable,
    SchemaError,
    SnapshotData,
    TrajectoryData,
    read_results,
    read_snapshots,
    read_trajectory,
)
from .render import FIGURE_KINDS, PlotJob, PlotResult, render, series_digest

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "PlotJob",
    "PlotResult",
    "ResultTable",
    "SchemaError",
    "SnapshotData",
    "TrajectoryData",
    "read_results",
    "read_snapshots",
    "read_trajectory",
    "render",
    "series_digest",
]
