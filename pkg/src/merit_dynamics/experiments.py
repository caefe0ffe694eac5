"""Named experiments, parameter sweeps and CSV persistence.

Every experiment consumes an :class:`ExperimentSpec` (grid of swept
parameters, fixed parameters, run count, horizon, master seed) and
produces a long-format :class:`ResultTable` with one record per grid
cell per statistic. Tables serialize to CSV as

    # schema_version=1
    # artifact_version=...
    # experiment=...
    # master_seed=...
    experiment,<cell keys...>,stat_name,mean,stderr,n_runs

Trajectory side files use ``t,x_a,x_b,delta,regime,admits_a,admits_b``;
ability snapshots use ``generation,group,ability``. All output is
byte-for-byte reproducible from (spec, master_seed): cells are visited in
declared grid order and every run's seed derives from the master seed by
a fixed mix, so worker counts cannot change results.
"""
from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bounds as bounds_mod
from .core import GroupState, ModelParams, TransitionModel
from .errors import BoundInvalidError, InvalidParamsError
from .meanfield import (
    aa_separation_lower_bound,
    epsilon_threshold,
    iterate,
)
from .richmodel import GROUP_A, RichParams, RichPopulation, run_rich
from .stochastic import SimConfig, Trajectory, derive_run_seed, run_ensemble

SCHEMA_VERSION = 1
ARTIFACT_VERSION = "0.1.0"

# Canonical asymmetric mean-field starts used by the advantage sweeps.
START_POINTS = {
    "under": (0.20, 0.19),
    "over": (0.5005, 0.4995),
}


# ── Result container and CSV schema ─────────────────────────────────────


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    cell: tuple[tuple[str, object], ...]
    stat: str
    mean: float
    stderr: float
    n: int

    def cell_dict(self) -> dict[str, object]:
        return dict(self.cell)


@dataclass
class ResultTable:
    experiment: str
    cell_keys: list[str]
    records: list[ResultRecord] = field(default_factory=list)
    metadata: dict[str, object] = field(default_factory=dict)

    def add(self, cell: dict[str, object], stat: str, values: Sequence[float] | np.ndarray):
        """Aggregate raw per-run values into a mean ± stderr record."""
        arr = np.asarray(values, dtype=float)
        n = len(arr)
        mean = float(arr.mean()) if n else math.nan
        stderr = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        self.add_summary(cell, stat, mean, stderr, n)

    def add_summary(self, cell: dict[str, object], stat: str, mean: float, stderr: float, n: int):
        self.records.append(
            ResultRecord(self.experiment, tuple(cell.items()), stat, mean, stderr, n)
        )

    def value(self, cell: dict[str, object], stat: str) -> float:
        """Mean of the unique record matching (cell, stat)."""
        want = tuple(cell.items())
        for rec in self.records:
            if rec.cell == want and rec.stat == stat:
                return rec.mean
        raise KeyError(f"no record for cell={cell} stat={stat}")


def _fmt(value) -> str:
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def write_results(table: ResultTable, path: str) -> None:
    """Write the long-format CSV (idempotent overwrite)."""
    try:
        with open(path, "w", newline="") as handle:
            handle.write(f"# schema_version={SCHEMA_VERSION}\n")
            handle.write(f"# artifact_version={ARTIFACT_VERSION}\n")
            handle.write(f"# experiment={table.experiment}\n")
            for key, value in table.metadata.items():
                handle.write(f"# {key}={_fmt(value)}\n")
            writer = csv.writer(handle)
            writer.writerow(["experiment", *table.cell_keys, "stat_name", "mean", "stderr", "n_runs"])
            for rec in table.records:
                cell = rec.cell_dict()
                writer.writerow(
                    [rec.experiment]
                    + [_fmt(cell.get(k, "")) for k in table.cell_keys]
                    + [rec.stat, _fmt(rec.mean), _fmt(rec.stderr), rec.n]
                )
    except OSError as exc:
        raise OSError(f"failed writing results to {path}: {exc}") from exc


def read_results(path: str) -> ResultTable:
    """Read a CSV produced by :func:`write_results`."""
    metadata: dict[str, object] = {}
    rows: list[list[str]] = []
    try:
        with open(path, newline="") as handle:
            plain = []
            for line in handle:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    metadata[key.strip()] = value
                else:
                    plain.append(line)
            rows = list(csv.reader(plain))
    except OSError as exc:
        raise OSError(f"failed reading results from {path}: {exc}") from exc
    header = rows[0]
    cell_keys = header[1:-4]
    experiment = str(metadata.get("experiment", rows[1][0] if len(rows) > 1 else ""))
    table = ResultTable(experiment=experiment, cell_keys=list(cell_keys), metadata=metadata)
    for row in rows[1:]:
        cell = {k: _parse_scalar(v) for k, v in zip(cell_keys, row[1 : 1 + len(cell_keys)])}
        stat, mean, stderr, n = row[-4:]
        table.add_summary(cell, stat, float(mean), float(stderr), int(n))
    return table


def write_trajectory(traj: Trajectory, path: str, metadata: dict[str, object] | None = None) -> None:
    """Per-step trajectory CSV: t,x_a,x_b,delta,regime,admits_a,admits_b."""
    try:
        with open(path, "w", newline="") as handle:
            handle.write(f"# schema_version={SCHEMA_VERSION}\n")
            handle.write(f"# run_seed={traj.run_seed}\n")
            handle.write(f"# capacity={traj.capacity}\n")
            for key, value in (metadata or {}).items():
                handle.write(f"# {key}={_fmt(value)}\n")
            writer = csv.writer(handle)
            writer.writerow(["t", "x_a", "x_b", "delta", "regime", "admits_a", "admits_b"])
            x_a, x_b, delta = traj.x_a, traj.x_b, traj.delta
            admits_a, admits_b = traj.admits_a, traj.admits_b
            for t in range(traj.horizon_t + 1):
                writer.writerow([
                    t,
                    _fmt(x_a[t]),
                    _fmt(x_b[t]),
                    _fmt(delta[t]),
                    "over" if traj.over_subscribed[t] else "under",
                    int(admits_a[t]),
                    int(admits_b[t]),
                ])
    except OSError as exc:
        raise OSError(f"failed writing trajectory to {path}: {exc}") from exc


def write_snapshots(snapshots: dict[int, RichPopulation], path: str) -> None:
    """Ability snapshot CSV: generation,group,ability (one row per individual).

    The admission threshold per snapshot generation is recorded as
    metadata so downstream rendering needs no statistics of its own.
    """
    try:
        with open(path, "w", newline="") as handle:
            handle.write(f"# schema_version={SCHEMA_VERSION}\n")
            for gen in sorted(snapshots):
                pop = snapshots[gen]
                if pop.admitted.any():
                    threshold = float(pop.ability[pop.admitted].min())
                    handle.write(f"# admit_threshold_{gen}={_fmt(threshold)}\n")
            writer = csv.writer(handle)
            writer.writerow(["generation", "group", "ability"])
            for gen in sorted(snapshots):
                pop = snapshots[gen]
                for i in range(pop.n_total):
                    label = "A" if pop.group[i] == GROUP_A else "B"
                    writer.writerow([gen, label, _fmt(float(pop.ability[i]))])
    except OSError as exc:
        raise OSError(f"failed writing snapshots to {path}: {exc}") from exc


def write_ensemble_summary(trajs: Sequence[Trajectory], path: str, metadata: dict[str, object] | None = None) -> None:
    """Per-step ensemble summary CSV (mean and stderr across runs)."""
    n = len(trajs)
    x_a = np.stack([t.x_a for t in trajs])
    x_b = np.stack([t.x_b for t in trajs])
    abs_delta = np.abs(np.stack([t.delta for t in trajs]))
    share_a = np.stack([t.admits_a / t.capacity for t in trajs])

    def se(mat):
        return mat.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(mat.shape[1])

    try:
        with open(path, "w", newline="") as handle:
            handle.write(f"# schema_version={SCHEMA_VERSION}\n")
            for key, value in (metadata or {}).items():
                handle.write(f"# {key}={_fmt(value)}\n")
            writer = csv.writer(handle)
            writer.writerow([
                "t",
                "x_a_mean", "x_a_stderr",
                "x_b_mean", "x_b_stderr",
                "abs_delta_mean", "abs_delta_stderr",
                "admit_share_a_mean", "admit_share_a_stderr",
                "n_runs",
            ])
            se_xa, se_xb, se_d, se_s = se(x_a), se(x_b), se(abs_delta), se(share_a)
            for t in range(x_a.shape[1]):
                writer.writerow([
                    t,
                    _fmt(x_a[:, t].mean()), _fmt(se_xa[t]),
                    _fmt(x_b[:, t].mean()), _fmt(se_xb[t]),
                    _fmt(abs_delta[:, t].mean()), _fmt(se_d[t]),
                    _fmt(share_a[:, t].mean()), _fmt(se_s[t]),
                    n,
                ])
    except OSError as exc:
        raise OSError(f"failed writing summary to {path}: {exc}") from exc


# ── Experiment spec ─────────────────────────────────────────────────────


@dataclass
class ExperimentSpec:
    experiment: str
    grid: dict[str, list]
    fixed: dict[str, object] = field(default_factory=dict)
    n_runs: int = 1
    horizon: int = 100
    master_seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InvalidParamsError(
                f"unknown experiment {self.experiment!r}; expected one of {sorted(EXPERIMENTS)}"
            )
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            raise InvalidParamsError("grid must be nonempty with nonempty value lists")
        if self.n_runs < 1 or self.horizon < 1:
            raise InvalidParamsError("n_runs and horizon must be >= 1")

    def cells(self):
        keys = list(self.grid)
        for combo in itertools.product(*(self.grid[k] for k in keys)):
            yield dict(zip(keys, combo))

    def merged(self, cell: dict[str, object]) -> dict[str, object]:
        return {**self.fixed, **cell}


def _parse_start(text: str) -> tuple[float, float]:
    try:
        a, b = (float(part) for part in str(text).split(","))
    except ValueError:
        raise InvalidParamsError(f"start must look like 'x_a,x_b', got {text!r}") from None
    return a, b


def _sim_config(settings: dict[str, object], spec: ExperimentSpec, cell_index: int) -> SimConfig:
    n = int(settings["n"])
    params = ModelParams(
        alpha=float(settings["alpha"]),
        p=float(settings["p"]),
        q=float(settings.get("q", 0.0)),
        epsilon=float(settings.get("eps", 0.0)),
        n_per_group=n,
    )
    x_a0, x_b0 = _parse_start(settings.get("start", "0.0,0.0"))
    initial = GroupState.from_counts(round(x_a0 * n), round(x_b0 * n), n)
    model = TransitionModel.parse(str(settings.get("model", "ea")))
    return SimConfig(
        params=params,
        model=model,
        initial=initial,
        horizon_t=spec.horizon,
        master_seed=derive_run_seed(spec.master_seed, cell_index),
        n_runs=spec.n_runs,
    )


def _base_metadata(spec: ExperimentSpec) -> dict[str, object]:
    meta: dict[str, object] = {"master_seed": spec.master_seed, "n_runs": spec.n_runs, "horizon": spec.horizon}
    for key, value in spec.fixed.items():
        meta[f"fixed_{key}"] = value
    return meta


def _out_path(spec: ExperimentSpec, name: str) -> str | None:
    if spec.out_dir is None:
        return None
    os.makedirs(spec.out_dir, exist_ok=True)
    return os.path.join(spec.out_dir, name)


# ── Experiments ─────────────────────────────────────────────────────────


def exp_trajectories(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Single-run (or small-ensemble) trajectories plus late-window levels.

    Writes one trajectory CSV per grid cell when an output directory is
    configured; the returned table summarizes the final half of the run.
    """
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    for index, cell in enumerate(spec.cells()):
        config = _sim_config(spec.merged(cell), spec, index)
        trajs = run_ensemble(config, n_workers=n_workers)
        window = slice((spec.horizon + 1) // 2, None)
        table.add(cell, "late_x_a", [t.x_a[window].mean() for t in trajs])
        table.add(cell, "late_x_b", [t.x_b[window].mean() for t in trajs])
        table.add(cell, "late_abs_delta", [np.abs(t.delta[window]).mean() for t in trajs])
        table.add(cell, "late_admit_share_a", [(t.admits_a[window] / t.capacity).mean() for t in trajs])
        label = "_".join(f"{k}{v}" for k, v in cell.items()).replace(",", "-").replace(".", "p")
        path = _out_path(spec, f"trajectory_{label}.csv")
        if path:
            write_trajectory(trajs[0], path, metadata={"cell": label})
    return table


def exp_max_separation_vs_n(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Mean of max_t |Delta(t)| per (alpha, N) cell, plus its 2*alpha ratio."""
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        config = _sim_config(settings, spec, index)
        trajs = run_ensemble(config, n_workers=n_workers)
        peaks = np.array([np.abs(t.delta).max() for t in trajs])
        table.add(cell, "max_abs_delta", peaks)
        table.add(cell, "max_abs_delta_ratio", peaks / (2.0 * float(settings["alpha"])))
    return table


def exp_time_to_parity(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Mean first time |Delta| <= eta across the configured grid."""
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        eta = float(settings["eta"])
        config = _sim_config(settings, spec, index)
        trajs = run_ensemble(config, n_workers=n_workers)
        stats = bounds_mod.empirical_hitting_times(trajs, eta, bounds_mod.PARITY)
        table.add(cell, "hitting_time", stats.uncensored)
        table.add_summary(cell, "n_censored", float(stats.n_censored), 0.0, stats.n_runs)
    return table


def exp_parity_bound_ratio(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Analytic parity-time bound vs empirical hitting times per cell.

    Cells where the bound is invalid (population below the validity
    threshold) are kept in the table with ``bound_valid = 0`` and NaN
    statistics rather than dropped.
    """
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        eta = float(settings["eta"])
        omega = float(settings["omega"])
        config = _sim_config(settings, spec, index)
        x_a0, x_b0 = _parse_start(settings["start"])
        inp = bounds_mod.ParityBoundInput(
            delta0=abs(x_a0 - x_b0), eta=eta, omega=omega, params=config.params
        )
        try:
            bound = bounds_mod.time_to_parity_bound(inp)
        except BoundInvalidError:
            table.add_summary(cell, "bound_valid", 0.0, 0.0, 0)
            for stat in ("bound_t", "empirical_mean_time", "ratio", "frac_missed_at_bound"):
                table.add_summary(cell, stat, math.nan, math.nan, 0)
            continue
        local = SimConfig(
            params=config.params,
            model=config.model,
            initial=config.initial,
            horizon_t=max(bound, 1),
            master_seed=config.master_seed,
            n_runs=spec.n_runs,
        )
        trajs = run_ensemble(local, n_workers=n_workers)
        stats = bounds_mod.empirical_hitting_times(trajs, eta, bounds_mod.PARITY)
        mean_time = stats.mean
        table.add_summary(cell, "bound_valid", 1.0, 0.0, spec.n_runs)
        table.add_summary(cell, "bound_t", float(bound), 0.0, spec.n_runs)
        table.add_summary(cell, "empirical_mean_time", mean_time, 0.0, stats.n_runs - stats.n_censored)
        ratio = bound / mean_time if mean_time and mean_time > 0 else math.nan
        table.add_summary(cell, "ratio", ratio, 0.0, stats.n_runs - stats.n_censored)
        table.add_summary(
            cell, "frac_missed_at_bound", stats.n_censored / stats.n_runs, 0.0, stats.n_runs
        )
    return table


def exp_delta_vs_epsilon(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Mean-field equilibrium separation vs the affinity advantage.

    Deterministic: each cell iterates the expectation map from the named
    start ("under" or "over") to the default tolerance and reports the
    converged separation alongside the analytic lower bound and the
    exclusion threshold.
    """
    del n_workers  # deterministic solves are cheap
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    for cell in spec.cells():
        settings = spec.merged(cell)
        params = ModelParams(
            alpha=float(settings["alpha"]),
            p=float(settings["p"]),
            q=float(settings.get("q", 0.0)),
            epsilon=float(settings["eps"]),
            n_per_group=int(settings.get("n", 1000)),
        )
        start_key = str(settings.get("start_regime", settings.get("start", "under")))
        x_a0, x_b0 = START_POINTS[start_key] if start_key in START_POINTS else _parse_start(start_key)
        report = iterate(
            TransitionModel.AFFINITY_ADVANTAGE,
            GroupState(x_a0, x_b0),
            params,
            tolerance=1e-12,
            max_iter=1_000_000,
        )
        point = report.final
        table.add_summary(cell, "equilibrium_delta", point.delta, 0.0, 1)
        table.add_summary(cell, "equilibrium_x_a", point.x_a, 0.0, 1)
        table.add_summary(cell, "equilibrium_total", point.total, 0.0, 1)
        table.add_summary(cell, "converged", float(report.converged), 0.0, 1)
        bound = aa_separation_lower_bound(params) if params.epsilon > 0 else 0.0
        table.add_summary(cell, "separation_lower_bound", bound, 0.0, 1)
        table.add_summary(
            cell, "epsilon_threshold", epsilon_threshold(params.alpha, params.p), 0.0, 1
        )
    return table


def _long_run_window(horizon: int) -> slice:
    return slice(int(math.ceil(0.75 * horizon)), None)


def exp_aa_heatmap(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Stochastic affinity-advantage grid: long-run separation and dominance.

    Long-run means the final quarter of the horizon, time-averaged per run
    before averaging across runs.
    """
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    table.metadata["long_run_window"] = "final 25% of horizon"
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        config = _sim_config(settings, spec, index)
        trajs = run_ensemble(config, n_workers=n_workers)
        window = _long_run_window(spec.horizon)
        abs_delta = []
        share = []
        for traj in trajs:
            d = traj.delta[window]
            abs_delta.append(np.abs(d).mean())
            h_a = traj.h_a[window].astype(float)
            h_b = traj.h_b[window].astype(float)
            total = h_a + h_b
            lead = np.where(total > 0, np.maximum(h_a, h_b) / np.where(total > 0, total, 1.0), 0.5)
            share.append(lead.mean())
        table.add(cell, "long_run_abs_delta", abs_delta)
        table.add(cell, "leading_share", share)
        table.add_summary(
            cell,
            "epsilon_threshold",
            epsilon_threshold(float(settings["alpha"]), float(settings["p"])),
            0.0,
            1,
        )
    return table


def _rich_params(settings: dict[str, object], horizon: int, seed: int) -> RichParams:
    affinity_mean = float(settings.get("affinity_mean", 0.0))
    affinity_sd = settings.get("affinity_sd")
    if affinity_sd is None:
        affinity_sd = affinity_mean / 2.0
    return RichParams(
        n_a=int(settings.get("n_a", 500)),
        n_b=int(settings.get("n_b", 500)),
        mu_a=float(settings.get("mu_a", 0.0)),
        mu_b=float(settings.get("mu_b", 0.0)),
        sigma_a=float(settings.get("sigma_a", 1.0)),
        sigma_b=float(settings.get("sigma_b", 1.0)),
        alpha=float(settings.get("alpha", 0.3)),
        boost_mean=float(settings.get("boost_mean", 1.0)),
        boost_sd=float(settings.get("boost_sd", 1.0)),
        theta=float(settings.get("theta", 1.0)),
        noise_sd=float(settings.get("noise_sd", 0.5)),
        affinity_mean=affinity_mean,
        affinity_sd=float(affinity_sd),
        horizon_t=horizon,
        master_seed=seed,
    )


def exp_rich_heatmap(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Leading-group admit share over the last 30 generations, per cell."""
    del n_workers  # per-generation numpy work dominates; runs stay serial
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    table.metadata["share_window"] = "last 30 generations"
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        params = _rich_params(settings, spec.horizon, derive_run_seed(spec.master_seed, index))
        shares = []
        for run in range(spec.n_runs):
            history, _ = run_rich(params, run_index=run)
            tail = history[-30:]
            shares.append(float(np.mean([m.leading_share for m in tail])))
        table.add(cell, "leading_share", shares)
    return table


RICH_SNAPSHOT_VARIANTS = {
    "baseline": (0.0, 0.0),
    "advantage": (0.20, 0.10),
}


def exp_rich_snapshots(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Ability distribution snapshots for a no-advantage/advantage pair."""
    del n_workers
    table = ResultTable(spec.experiment, list(spec.grid), metadata=_base_metadata(spec))
    snapshot_gens = tuple(int(g) for g in spec.fixed.get("snapshots", (1, 10, 20, 99)))
    for index, cell in enumerate(spec.cells()):
        settings = spec.merged(cell)
        variant = str(cell.get("variant", "baseline"))
        mean, sd = RICH_SNAPSHOT_VARIANTS[variant]
        settings = {**settings, "affinity_mean": mean, "affinity_sd": sd}
        params = _rich_params(settings, spec.horizon, derive_run_seed(spec.master_seed, index))
        history, snapshots = run_rich(params, run_index=0, snapshot_generations=snapshot_gens)
        table.add(cell, "final_leading_share", [history[-1].leading_share])
        path = _out_path(spec, f"snapshot_{variant}.csv")
        if path:
            write_snapshots(snapshots, path)
    return table


EXPERIMENTS: dict[str, Callable[..., ResultTable]] = {
    "trajectories": exp_trajectories,
    "max_separation": exp_max_separation_vs_n,
    "parity_times": exp_time_to_parity,
    "parity_bound_ratio": exp_parity_bound_ratio,
    "separation_vs_advantage": exp_delta_vs_epsilon,
    "advantage_heatmap": exp_aa_heatmap,
    "rich_heatmap": exp_rich_heatmap,
    "rich_snapshots": exp_rich_snapshots,
}


def run_experiment(spec: ExperimentSpec, n_workers: int = 1) -> ResultTable:
    """Dispatch a spec to its experiment, returning the result table."""
    runner = EXPERIMENTS[spec.experiment]
    return runner(spec, n_workers=n_workers)


# ── Presets ─────────────────────────────────────────────────────────────


def _spread(start: float, stop: float, step: float) -> list[float]:
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _preset_specs() -> dict[str, Callable[[], ExperimentSpec]]:
    return {
        # Sample trajectories from an over- and an under-subscribed start.
        "fig1": lambda: ExperimentSpec(
            "trajectories",
            grid={"start": ["0.1,0.7", "0.1,0.4"]},
            fixed={"model": "ea", "alpha": 0.3, "p": 0.9, "q": 0.4, "n": 2000},
            n_runs=1, horizon=400, master_seed=11,
        ),
        # Average maximum separation versus population size.
        "fig2": lambda: ExperimentSpec(
            "max_separation",
            grid={"alpha": [0.1, 0.25, 0.499], "n": [10, 20, 50, 100, 200, 500, 1000]},
            fixed={"p": 0.9, "q": 0.4, "start": "0.5,0.5"},
            n_runs=100, horizon=100, master_seed=22,
        ),
        # Identical symmetric starts, with and without the affinity advantage.
        "fig3": lambda: ExperimentSpec(
            "trajectories",
            grid={"model": ["ea", "aa"]},
            fixed={"alpha": 0.3, "p": 0.9, "q": 0.4, "eps": 0.03, "n": 1000, "start": "0.2,0.2"},
            n_runs=1, horizon=500, master_seed=33,
        ),
        # Mean-field equilibrium separation vs advantage, with the bound.
        "fig4": lambda: ExperimentSpec(
            "separation_vs_advantage",
            grid={"eps": _spread(0.01, 0.30, 0.01)},
            fixed={"alpha": 0.3, "p": 0.9, "q": 0.0, "start_regime": "under"},
            n_runs=1, horizon=1, master_seed=44,
        ),
        # Rich-model heatmap of leading-group admit share.
        "fig5": lambda: ExperimentSpec(
            "rich_heatmap",
            grid={"alpha": [0.1, 0.2, 0.3, 0.45], "affinity_mean": [0.0, 0.06, 0.12, 0.24]},
            fixed={},
            n_runs=100, horizon=500, master_seed=55,
        ),
        # Rich-model ability distribution snapshots.
        "fig6": lambda: ExperimentSpec(
            "rich_snapshots",
            grid={"variant": ["baseline", "advantage"]},
            fixed={"snapshots": (1, 10, 20, 99)},
            n_runs=1, horizon=100, master_seed=66,
        ),
        # Mean time to parity versus college success probability.
        "fig7": lambda: ExperimentSpec(
            "parity_times",
            grid={"p": _spread(0.70, 0.96, 0.02)},
            fixed={"model": "ea", "alpha": 0.3, "q": 0.4, "n": 2000, "start": "0.9,0.1", "eta": 0.01},
            n_runs=100, horizon=3000, master_seed=77,
        ),
        # Mean time to parity versus the persistence probability.
        "fig7q": lambda: ExperimentSpec(
            "parity_times",
            grid={"q": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]},
            fixed={"model": "ea", "alpha": 0.3, "p": 0.95, "n": 2000, "start": "0.9,0.1", "eta": 0.01},
            n_runs=100, horizon=3000, master_seed=78,
        ),
        # Time-to-parity heatmap over capacity, success and persistence.
        "fig8": lambda: ExperimentSpec(
            "parity_times",
            grid={
                "alpha": [0.2, 0.3, 0.4],
                "p": [0.7, 0.8, 0.9],
                "q": [0.0, 0.2, 0.4],
                "start": ["0.9,0.1", "0.25,0.05"],
            },
            fixed={"model": "ea", "n": 2000, "eta": 0.01},
            n_runs=100, horizon=3000, master_seed=88,
        ),
        # Parity-time bound vs empirical times.
        "fig9": lambda: ExperimentSpec(
            "parity_bound_ratio",
            grid={"alpha": [0.1, 0.2, 0.3, 0.4], "p": [0.8, 0.85, 0.9, 0.95]},
            fixed={"model": "ea", "q": 0.4, "n": 65000, "start": "0.9,0.1", "eta": 0.05, "omega": 0.05},
            n_runs=100, horizon=1, master_seed=99,
        ),
        # Equilibrium separation vs advantage for several q, both starts.
        "fig10": lambda: ExperimentSpec(
            "separation_vs_advantage",
            grid={
                "q": [0.0, 0.2, 0.4],
                "eps": _spread(0.01, 0.30, 0.01),
                "start_regime": ["under", "over"],
            },
            fixed={"alpha": 0.3, "p": 0.9},
            n_runs=1, horizon=1, master_seed=100,
        ),
        # Stochastic affinity-advantage heatmap.
        "fig11": lambda: ExperimentSpec(
            "advantage_heatmap",
            grid={
                "alpha": [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45],
                "eps": [0.0, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.16, 0.2],
            },
            fixed={"model": "aa", "p": 0.9, "q": 0.4, "n": 1000, "start": "0.2,0.2"},
            n_runs=1000, horizon=500, master_seed=111,
        ),
        # Desk-scale variants for CI and quick reproduction.
        "desk-fig2": lambda: ExperimentSpec(
            "max_separation",
            grid={"alpha": [0.1], "n": [10, 20, 50, 100, 500]},
            fixed={"p": 0.9, "q": 0.4, "start": "0.5,0.5"},
            n_runs=100, horizon=100, master_seed=22,
        ),
        "desk-fig5": lambda: ExperimentSpec(
            "rich_heatmap",
            grid={"alpha": [0.1, 0.3, 0.45], "affinity_mean": [0.0, 0.06, 0.24]},
            fixed={},
            n_runs=30, horizon=200, master_seed=55,
        ),
        "desk-fig7": lambda: ExperimentSpec(
            "parity_times",
            grid={"p": [0.70, 0.96]},
            fixed={"model": "ea", "alpha": 0.3, "q": 0.4, "n": 2000, "start": "0.9,0.1", "eta": 0.01},
            n_runs=50, horizon=3000, master_seed=77,
        ),
        "desk-fig8": lambda: ExperimentSpec(
            "parity_times",
            grid={"alpha": [0.2, 0.3], "p": [0.7, 0.9], "q": [0.0, 0.4], "start": ["0.9,0.1"]},
            fixed={"model": "ea", "n": 2000, "eta": 0.01},
            n_runs=20, horizon=3000, master_seed=88,
        ),
        "desk-fig9": lambda: ExperimentSpec(
            "parity_bound_ratio",
            grid={"alpha": [0.2, 0.3], "p": [0.8, 0.9]},
            fixed={"model": "ea", "q": 0.4, "n": 65000, "start": "0.9,0.1", "eta": 0.05, "omega": 0.05},
            n_runs=20, horizon=1, master_seed=99,
        ),
        "desk-fig11": lambda: ExperimentSpec(
            "advantage_heatmap",
            grid={"alpha": [0.1, 0.3], "eps": [0.0, 0.03, 0.1]},
            fixed={"model": "aa", "p": 0.9, "q": 0.4, "n": 1000, "start": "0.2,0.2"},
            n_runs=30, horizon=400, master_seed=111,
        ),
    }


PRESETS = _preset_specs()


def preset_spec(name: str) -> ExperimentSpec:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise InvalidParamsError(f"unknown preset {name!r}; see --list") from None
    return builder()


def list_presets() -> list[str]:
    return sorted(PRESETS)
