"""Figure rendering for merit-dynamics CSVs.

Every renderer records the exact numeric series it draws and exposes a
digest of them; by construction the digest matches one computed directly
from the corresponding CSV columns, so tests can prove the plotting
layer added, dropped or reinterpreted nothing. The only presentation
arithmetic allowed is axis placement (e.g. scaling admit counts by the
declared capacity constant), and every such constant is surfaced in
``PlotResult.extras``.

Figure kinds:
  trajectories      one or more trajectory CSVs; fractions on top,
                    admit shares (counts / declared capacity) below
  separation-vs-n   max-separation table; ratio vs population size
  delta-vs-eps      equilibrium separation vs advantage, with the
                    analytic lower bound and the exclusion threshold
  parity-times      mean hitting time vs a swept parameter
  heatmap           annotated mean +/- stderr matrix on two grid keys,
                    with the threshold curve overlaid when present
  snapshots         per-generation ability histograms with the admit
                    threshold line from file metadata
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    ResultTable,
    SchemaError,
    read_results,
    read_snapshots,
    read_trajectory,
)

FIGURE_KINDS = (
    "trajectories",
    "separation-vs-n",
    "delta-vs-eps",
    "parity-times",
    "heatmap",
    "snapshots",
)


@dataclass
class PlotJob:
    kind: str
    inputs: list[str]
    out_path: str
    stat: str | None = None
    log_x: bool = False
    annotate: bool = True

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


@dataclass
class PlotResult:
    out_path: str
    series: dict[str, list[float]] = field(default_factory=dict)
    extras: dict[str, float | str] = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return series_digest(self.series)


def series_digest(series: dict[str, list]) -> str:
    """Canonical digest of named numeric series (order-insensitive keys)."""
    hasher = hashlib.sha256()
    for name in sorted(series):
        hasher.update(name.encode())
        hasher.update(b"\x00")
        for value in series[name]:
            hasher.update(repr(float(value)).encode())
            hasher.update(b",")
        hasher.update(b"\n")
    return hasher.hexdigest()


def _save(fig, out_path: str) -> None:
    if os.path.splitext(out_path)[1].lower() not in (".png", ".svg"):
        raise SchemaError(f"output must be .png or .svg, got {out_path!r}")
    fig.savefig(out_path)
    plt.close(fig)


def _cell_label(row: dict, keys: list[str]) -> str:
    return ", ".join(f"{k}={row[k]}" for k in keys)


def _render_trajectories(job: PlotJob) -> PlotResult:
    data = [read_trajectory(path) for path in job.inputs]
    result = PlotResult(out_path=job.out_path)
    fig, axes = plt.subplots(
        2, len(data), figsize=(5.0 * len(data), 6.0), sharex="col", squeeze=False
    )
    for col, traj in enumerate(data):
        capacity = float(traj.metadata.get("capacity", 0)) or None
        t = traj.columns["t"]
        x_a, x_b = traj.columns["x_a"], traj.columns["x_b"]
        admits_a, admits_b = traj.columns["admits_a"], traj.columns["admits_b"]
        tag = f"[{col}]" if len(data) > 1 else ""
        result.series[f"t{tag}"] = t
        result.series[f"x_a{tag}"] = x_a
        result.series[f"x_b{tag}"] = x_b
        result.series[f"admits_a{tag}"] = admits_a
        result.series[f"admits_b{tag}"] = admits_b
        top, bottom = axes[0][col], axes[1][col]
        top.plot(t, x_a, label="group A", lw=1.0)
        top.plot(t, x_b, label="group B", lw=1.0)
        top.set_ylabel("high-type fraction")
        top.legend(fontsize=8)
        if capacity:
            result.extras[f"capacity{tag}"] = capacity
            bottom.plot(t, np.asarray(admits_a, dtype=float) / capacity, lw=1.0)
            bottom.plot(t, np.asarray(admits_b, dtype=float) / capacity, lw=1.0)
            bottom.axhline(0.5, color="grey", ls=":", lw=0.8)
            bottom.set_ylabel("share of admissions")
        else:
            bottom.plot(t, admits_a, lw=1.0)
            bottom.plot(t, admits_b, lw=1.0)
            bottom.set_ylabel("admitted per group")
        bottom.set_xlabel("generation")
        top.set_title(os.path.basename(traj.path), fontsize=8)
    fig.tight_layout()
    _save(fig, job.out_path)
    return result


def _line_groups(table: ResultTable, rows: list[dict], x_key: str) -> dict[str, list[dict]]:
    other_keys = [k for k in table.cell_keys if k != x_key]
    groups: dict[str, list[dict]] = {}
    for row in rows:
        label = _cell_label(row, other_keys) if other_keys else "all"
        groups.setdefault(label, []).append(row)
    return groups


def _render_result_curves(
    job: PlotJob,
    table: ResultTable,
    stat: str,
    x_key: str,
    y_label: str,
    extra_stat: str | None = None,
) -> PlotResult:
    rows = table.require_stat(stat)
    result = PlotResult(out_path=job.out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, group in _line_groups(table, rows, x_key).items():
        xs = [row[x_key] for row in group]
        ys = [row["mean"] for row in group]
        errs = [row["stderr"] for row in group]
        result.series[f"{x_key}[{label}]"] = xs
        result.series[f"{stat}[{label}]"] = ys
        result.series[f"{stat}_stderr[{label}]"] = errs
        ax.errorbar(xs, ys, yerr=errs, marker="o", ms=3, lw=1.0, capsize=2, label=label)
    if extra_stat:
        for label, group in _line_groups(table, table.require_stat(extra_stat), x_key).items():
            xs = [row[x_key] for row in group]
            ys = [row["mean"] for row in group]
            result.series[f"{extra_stat}[{label}]"] = ys
            ax.plot(xs, ys, ls="--", lw=1.0, color="tab:orange")
    if job.log_x:
        ax.set_xscale("log")
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_label)
    if len(result.series) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    return result, fig, ax


def _render_separation_vs_n(job: PlotJob) -> PlotResult:
    table = read_results(job.inputs[0])
    if "n" not in table.cell_keys:
        raise SchemaError(f"{table.path}: separation-vs-n needs an 'n' grid column")
    result, fig, _ = _render_result_curves(
        job, table, "max_abs_delta_ratio", "n", "mean max separation / 2*alpha"
    )
    _save(fig, job.out_path)
    return result


def _render_delta_vs_eps(job: PlotJob) -> PlotResult:
    table = read_results(job.inputs[0])
    if "eps" not in table.cell_keys:
        raise SchemaError(f"{table.path}: delta-vs-eps needs an 'eps' grid column")
    result, fig, ax = _render_result_curves(
        job,
        table,
        "equilibrium_delta",
        "eps",
        "equilibrium separation",
        extra_stat="separation_lower_bound",
    )
    thresholds = table.require_stat("epsilon_threshold")
    threshold = thresholds[0]["mean"]
    result.series["epsilon_threshold"] = [row["mean"] for row in thresholds]
    result.extras["threshold_x"] = threshold
    ax.axvline(threshold, color="k", lw=0.9, ls="-.")
    if job.annotate:
        ax.annotate("exclusion threshold", (threshold, ax.get_ylim()[1] * 0.95), fontsize=7)
    _save(fig, job.out_path)
    return result


def _render_parity_times(job: PlotJob) -> PlotResult:
    table = read_results(job.inputs[0])
    sweep_keys = [k for k in table.cell_keys if len(table.axis_values(k)) > 1]
    x_key = sweep_keys[0] if sweep_keys else table.cell_keys[0]
    result, fig, _ = _render_result_curves(
        job, table, "hitting_time", x_key, "mean generations to parity"
    )
    _save(fig, job.out_path)
    return result


def _render_heatmap(job: PlotJob) -> PlotResult:
    table = read_results(job.inputs[0])
    stat = job.stat or table.stats()[0]
    rows = table.require_stat(stat)
    grid_keys = [k for k in table.cell_keys if len(table.axis_values(k)) > 1]
    if len(grid_keys) < 2:
        grid_keys = table.cell_keys[:2]
    if len(grid_keys) != 2:
        raise SchemaError(f"{table.path}: heatmap needs exactly two grid columns, has {grid_keys}")
    x_key, y_key = grid_keys
    xs = table.axis_values(x_key)
    ys = table.axis_values(y_key)
    matrix = np.full((len(ys), len(xs)), np.nan)
    errors = np.full_like(matrix, np.nan)
    for row in rows:
        i = ys.index(row[y_key])
        j = xs.index(row[x_key])
        matrix[i, j] = row["mean"]
        errors[i, j] = row["stderr"]
    result = PlotResult(out_path=job.out_path)
    result.series[f"{stat}_mean"] = [row["mean"] for row in rows]
    result.series[f"{stat}_stderr"] = [row["stderr"] for row in rows]
    fig, ax = plt.subplots(figsize=(1.1 * len(xs) + 2.5, 0.7 * len(ys) + 2.0))
    image = ax.imshow(matrix, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(xs)), [str(v) for v in xs], fontsize=7)
    ax.set_yticks(range(len(ys)), [str(v) for v in ys], fontsize=7)
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_key)
    fig.colorbar(image, ax=ax, label=stat)
    if job.annotate:
        for i in range(len(ys)):
            for j in range(len(xs)):
                if not np.isnan(matrix[i, j]):
                    ax.text(
                        j, i, f"{matrix[i, j]:.2f}\n±{errors[i, j]:.2f}",
                        ha="center", va="center", fontsize=6, color="w",
                    )
    # Exclusion-threshold curve, when the table carries it per cell.
    if "epsilon_threshold" in table.stats() and y_key == "eps":
        curve = {}
        for row in table.require_stat("epsilon_threshold"):
            curve[row[x_key]] = row["mean"]
        ys_numeric = [float(v) for v in ys]
        positions = []
        for x_val in xs:
            positions.append(float(np.interp(curve[x_val], ys_numeric, range(len(ys)))))
        result.series["epsilon_threshold"] = [curve[x] for x in xs]
        ax.plot(range(len(xs)), positions, "w--", lw=1.2)
    fig.tight_layout()
    _save(fig, job.out_path)
    return result


def _render_snapshots(job: PlotJob) -> PlotResult:
    data = read_snapshots(job.inputs[0])
    generations = data.generations()
    result = PlotResult(out_path=job.out_path)
    fig, axes = plt.subplots(
        1, len(generations), figsize=(3.2 * len(generations), 3.0), squeeze=False
    )
    for col, gen in enumerate(generations):
        ax = axes[0][col]
        for group, color in (("A", "tab:blue"), ("B", "tab:red")):
            abilities = data.abilities(gen, group)
            result.series[f"ability[g{gen},{group}]"] = abilities
            ax.hist(abilities, bins=30, alpha=0.55, color=color, label=f"group {group}")
        threshold = data.threshold(gen)
        if threshold is not None:
            result.extras[f"threshold_{gen}"] = threshold
            ax.axvline(threshold, color="red", lw=1.0)
        ax.set_title(f"t = {gen}", fontsize=9)
        ax.set_xlabel("ability")
        if col == 0:
            ax.set_ylabel("count")
            ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, job.out_path)
    return result


def render(job: PlotJob) -> PlotResult:
    """Render one figure; returns the plotted series and their digest."""
    renderers = {
        "trajectories": _render_trajectories,
        "separation-vs-n": _render_separation_vs_n,
        "delta-vs-eps": _render_delta_vs_eps,
        "parity-times": _render_parity_times,
        "heatmap": _render_heatmap,
        "snapshots": _render_snapshots,
    }
    return renderers[job.kind](job)
