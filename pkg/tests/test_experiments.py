import math

import numpy as np
import pytest

from merit_dynamics.errors import InvalidParamsError
from merit_dynamics.experiments import (
    EXPERIMENTS,
    START_POINTS,
    ExperimentSpec,
    ResultTable,
    exp_delta_vs_epsilon,
    exp_max_separation_vs_n,
    exp_parity_bound_ratio,
    exp_rich_snapshots,
    exp_time_to_parity,
    exp_trajectories,
    list_presets,
    preset_spec,
    read_results,
    run_experiment,
    write_results,
    write_trajectory,
)
from merit_dynamics.core import GroupState, ModelParams, TransitionModel
from merit_dynamics.stochastic import SimConfig, run_trajectory


def tiny_spec(**overrides):
    base = dict(
        experiment="max_separation",
        grid={"alpha": [0.1, 0.3], "n": [20, 50]},
        fixed={"p": 0.9, "q": 0.4, "start": "1,1"},
        n_runs=5,
        horizon=30,
        master_seed=5,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


class TestSpec:
    def test_unknown_experiment_rejected(self):
        with pytest.raises(InvalidParamsError):
            tiny_spec(experiment="nope")

    def test_empty_grid_rejected(self):
        with pytest.raises(InvalidParamsError):
            tiny_spec(grid={})
        with pytest.raises(InvalidParamsError):
            tiny_spec(grid={"alpha": []})

    def test_cells_iterate_in_declared_order(self):
        cells = list(tiny_spec().cells())
        assert cells[0] == {"alpha": 0.1, "n": 20}
        assert cells[-1] == {"alpha": 0.3, "n": 50}
        assert len(cells) == 4


class TestResultCSV:
    def test_round_trip(self, tmp_path):
        table = exp_max_separation_vs_n(tiny_spec())
        path = tmp_path / "out.csv"
        write_results(table, str(path))
        back = read_results(str(path))
        assert back.experiment == table.experiment
        assert back.cell_keys == table.cell_keys
        assert len(back.records) == len(table.records)
        for a, b in zip(table.records, back.records):
            assert a.cell == b.cell and a.stat == b.stat and a.n == b.n
            assert a.mean == b.mean or (math.isnan(a.mean) and math.isnan(b.mean))
            assert a.stderr == b.stderr

    def test_reruns_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_results(exp_max_separation_vs_n(tiny_spec()), str(p1))
        write_results(exp_max_separation_vs_n(tiny_spec()), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_table_header_only(self, tmp_path):
        table = ResultTable(experiment="max_separation", cell_keys=["alpha"])
        path = tmp_path / "empty.csv"
        write_results(table, str(path))
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines == ["experiment,alpha,stat_name,mean,stderr,n_runs"]

    def test_metadata_comments_present(self, tmp_path):
        path = tmp_path / "meta.csv"
        write_results(exp_max_separation_vs_n(tiny_spec()), str(path))
        text = path.read_text()
        assert "# schema_version=" in text
        assert "# master_seed=5" in text
        assert "# experiment=max_separation" in text

    def test_io_error_has_path_context(self):
        table = ResultTable(experiment="max_separation", cell_keys=[])
        with pytest.raises(OSError, match="no/such/dir"):
            write_results(table, "/no/such/dir/out.csv")


class TestGridCompleteness:
    def test_one_record_per_cell_per_stat(self):
        spec = tiny_spec()
        table = exp_max_separation_vs_n(spec)
        cells = [tuple(c.items()) for c in spec.cells()]
        stats = {r.stat for r in table.records}
        seen = {(r.cell, r.stat) for r in table.records}
        assert len(seen) == len(table.records)
        assert len(table.records) == len(cells) * len(stats)

    def test_stderr_shrinks_with_more_runs(self):
        small = exp_max_separation_vs_n(tiny_spec(n_runs=40))
        large = exp_max_separation_vs_n(tiny_spec(n_runs=160))
        ratios = []
        for rec_s, rec_l in zip(small.records, large.records):
            if rec_s.stat == "max_abs_delta" and rec_s.stderr > 0:
                ratios.append(rec_s.stderr / rec_l.stderr)
        # Quadrupling runs halves the stderr (allow sampling noise).
        assert 1.5 <= float(np.mean(ratios)) <= 2.5


class TestTrajectoriesExperiment:
    def test_parity_levels_and_files(self, tmp_path):
        spec = ExperimentSpec(
            experiment="trajectories",
            grid={"start": ["0.1,0.7", "0.1,0.4"]},
            fixed={"model": "ea", "alpha": 0.3, "p": 0.9, "q": 0.4, "n": 2000},
            n_runs=1,
            horizon=300,
            master_seed=11,
            out_dir=str(tmp_path),
        )
        table = exp_trajectories(spec)
        for cell in spec.cells():
            assert table.value(cell, "late_x_a") == pytest.approx(0.27, abs=0.03)
            assert table.value(cell, "late_admit_share_a") == pytest.approx(0.5, abs=0.05)
        files = sorted(p.name for p in tmp_path.glob("trajectory_*.csv"))
        assert len(files) == 2

    def test_symmetric_ea_start_stays_balanced(self):
        spec = ExperimentSpec(
            experiment="trajectories",
            grid={"model": ["ea"]},
            fixed={"alpha": 0.3, "p": 0.9, "q": 0.4, "n": 1000, "start": "0.2,0.2"},
            n_runs=3,
            horizon=200,
            master_seed=3,
        )
        table = exp_trajectories(spec)
        assert table.value({"model": "ea"}, "late_abs_delta") < 0.05


class TestTrajectoryCSV:
    def test_schema_and_rows(self, tmp_path):
        params = ModelParams(alpha=0.3, p=0.9, q=0.4, n_per_group=100)
        cfg = SimConfig(
            params=params,
            model=TransitionModel.EQUAL_ADVANTAGE,
            initial=GroupState.from_counts(10, 70, 100),
            horizon_t=5,
            master_seed=1,
        )
        path = tmp_path / "traj.csv"
        write_trajectory(run_trajectory(cfg, 0), str(path))
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "t,x_a,x_b,delta,regime,admits_a,admits_b"
        assert len(lines) == 7
        first = lines[1].split(",")
        assert first[0] == "0" and first[4] in ("over", "under")


class TestDeltaVsEpsilon:
    def test_equilibrium_matches_closed_forms(self):
        spec = ExperimentSpec(
            experiment="separation_vs_advantage",
            grid={"q": [0.0, 0.4], "eps": [0.05, 0.2], "start_regime": ["under", "over"]},
            fixed={"alpha": 0.3, "p": 0.9},
            n_runs=1,
            horizon=1,
            master_seed=0,
        )
        table = exp_delta_vs_epsilon(spec)
        for start in ("under", "over"):
            # Above the threshold the equilibrium separation is closed-form.
            for q, expected in ((0.0, 0.62), (0.4, 0.6333333333333333)):
                cell = {"q": q, "eps": 0.2, "start_regime": start}
                assert table.value(cell, "equilibrium_delta") == pytest.approx(expected, abs=1e-9)
            # Below the threshold the under-subscribed equilibrium is q-free.
            sub_q0 = table.value({"q": 0.0, "eps": 0.05, "start_regime": start}, "equilibrium_delta")
            sub_q4 = table.value({"q": 0.4, "eps": 0.05, "start_regime": start}, "equilibrium_delta")
            assert sub_q0 == pytest.approx(sub_q4, abs=1e-8)
        # Both starts agree.
        for q in (0.0, 0.4):
            for eps in (0.05, 0.2):
                under = table.value({"q": q, "eps": eps, "start_regime": "under"}, "equilibrium_delta")
                over = table.value({"q": q, "eps": eps, "start_regime": "over"}, "equilibrium_delta")
                assert under == pytest.approx(over, abs=1e-8)

    def test_threshold_stat_constant(self):
        spec = ExperimentSpec(
            experiment="separation_vs_advantage",
            grid={"eps": [0.01, 0.1]},
            fixed={"alpha": 0.3, "p": 0.9, "q": 0.0, "start_regime": "under"},
            n_runs=1,
            horizon=1,
            master_seed=0,
        )
        table = exp_delta_vs_epsilon(spec)
        for cell in spec.cells():
            assert table.value(cell, "epsilon_threshold") == pytest.approx(0.15, abs=1e-12)


class TestParityExperiments:
    def test_time_to_parity_zero_when_start_at_parity(self):
        spec = ExperimentSpec(
            experiment="parity_times",
            grid={"p": [0.9]},
            fixed={"model": "ea", "alpha": 0.3, "q": 0.4, "n": 2000, "start": "0.2,0.2", "eta": 0.01},
            n_runs=3,
            horizon=50,
            master_seed=2,
        )
        table = exp_time_to_parity(spec)
        assert table.value({"p": 0.9}, "hitting_time") == 0.0

    def test_bound_ratio_valid_cell(self):
        spec = ExperimentSpec(
            experiment="parity_bound_ratio",
            grid={"alpha": [0.3], "p": [0.9]},
            fixed={"model": "ea", "q": 0.4, "n": 65000, "start": "0.9,0.1", "eta": 0.05, "omega": 0.05},
            n_runs=5,
            horizon=1,
            master_seed=9,
        )
        table = exp_parity_bound_ratio(spec)
        cell = {"alpha": 0.3, "p": 0.9}
        assert table.value(cell, "bound_valid") == 1.0
        assert table.value(cell, "bound_t") == 57.0
        assert table.value(cell, "ratio") >= 1.0

    def test_bound_ratio_invalid_cell_marked(self):
        spec = ExperimentSpec(
            experiment="parity_bound_ratio",
            grid={"alpha": [0.3], "p": [0.9]},
            fixed={"model": "ea", "q": 0.4, "n": 200, "start": "0.9,0.1", "eta": 0.05, "omega": 0.05},
            n_runs=2,
            horizon=1,
            master_seed=9,
        )
        table = exp_parity_bound_ratio(spec)
        cell = {"alpha": 0.3, "p": 0.9}
        assert table.value(cell, "bound_valid") == 0.0
        assert math.isnan(table.value(cell, "ratio"))


class TestRichSnapshots:
    def test_files_written_with_thresholds(self, tmp_path):
        spec = ExperimentSpec(
            experiment="rich_snapshots",
            grid={"variant": ["baseline", "advantage"]},
            fixed={"snapshots": (1, 5), "n_a": 100, "n_b": 100},
            n_runs=1,
            horizon=8,
            master_seed=6,
            out_dir=str(tmp_path),
        )
        exp_rich_snapshots(spec)
        for variant in ("baseline", "advantage"):
            text = (tmp_path / f"snapshot_{variant}.csv").read_text()
            lines = [l for l in text.splitlines() if not l.startswith("#")]
            assert lines[0] == "generation,group,ability"
            assert len(lines) == 1 + 2 * 200
            assert "# admit_threshold_1=" in text
            assert "# admit_threshold_5=" in text


class TestPresets:
    def test_all_presets_buildable(self):
        names = list_presets()
        assert {"fig1", "fig2", "fig5", "fig9", "fig11", "desk-fig9"} <= set(names)
        for name in names:
            spec = preset_spec(name)
            assert spec.experiment in EXPERIMENTS

    def test_unknown_preset(self):
        with pytest.raises(InvalidParamsError):
            preset_spec("fig99")

    def test_start_points_regimes(self):
        under = START_POINTS["under"]
        over = START_POINTS["over"]
        assert sum(under) < 0.6 < sum(over)

    def test_run_experiment_dispatch(self):
        table = run_experiment(tiny_spec(n_runs=2, grid={"alpha": [0.1], "n": [20]}))
        assert table.experiment == "max_separation"
        assert table.records
