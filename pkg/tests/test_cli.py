import json

import pytest

from merit_dynamics.cli import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    apply_overrides,
    main,
    parse_config_file,
)
from merit_dynamics.errors import InvalidParamsError
from merit_dynamics.experiments import preset_spec


def run_cli(*argv):
    return main(list(argv))


class TestSimulate:
    BASE = [
        "simulate", "--model", "ea", "--alpha", "0.3", "--p", "0.9", "--q", "0.4",
        "--n", "200", "--t", "50", "--runs", "1", "--seed", "3", "--init", "0.1,0.7",
    ]

    def test_writes_trajectory(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert run_cli(*self.BASE, "--out", str(out)) == EXIT_OK
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "t,x_a,x_b,delta,regime,admits_a,admits_b"
        assert len(lines) == 52

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(*self.BASE, "--out", str(a)) == EXIT_OK
        assert run_cli(*self.BASE, "--out", str(b)) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_ensemble_summary(self, tmp_path):
        out = tmp_path / "summary.csv"
        argv = self.BASE.copy()
        argv[argv.index("--runs") + 1] = "4"
        assert run_cli(*argv, "--out", str(out)) == EXIT_OK
        header = [l for l in out.read_text().splitlines() if not l.startswith("#")][0]
        assert header.startswith("t,x_a_mean,x_a_stderr")

    def test_invalid_alpha_exits_2(self, tmp_path, capsys):
        argv = self.BASE.copy()
        argv[argv.index("--alpha") + 1] = "0.6"
        assert run_cli(*argv, "--out", str(tmp_path / "x.csv")) == EXIT_INVALID
        assert "alpha" in capsys.readouterr().err

    def test_io_failure_exits_3(self):
        assert run_cli(*self.BASE, "--out", "/no/such/dir/x.csv") == EXIT_IO

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MERIT_DYNAMICS_THREADS", "2")
        out = tmp_path / "t.csv"
        argv = self.BASE.copy()
        argv[argv.index("--runs") + 1] = "3"
        assert run_cli(*argv, "--out", str(out)) == EXIT_OK


class TestFixedpoint:
    def test_ea_line(self, capsys):
        assert run_cli("fixedpoint", "--model", "ea", "--alpha", "0.3", "--p", "0.9") == EXIT_OK
        fields = capsys.readouterr().out.split()
        assert float(fields[0]) == pytest.approx(0.27, abs=1e-12)
        assert float(fields[1]) == pytest.approx(0.27, abs=1e-12)
        assert fields[2] == "under"
        assert float(fields[3]) <= 1e-12

    def test_aa_above_threshold(self, capsys):
        assert run_cli(
            "fixedpoint", "--model", "aa", "--alpha", "0.3", "--p", "0.9", "--eps", "0.2"
        ) == EXIT_OK
        fields = capsys.readouterr().out.split()
        assert float(fields[0]) == pytest.approx(0.62, abs=1e-9)
        assert float(fields[1]) == pytest.approx(0.0, abs=1e-9)
        assert fields[2] == "over"
        assert float(fields[4]) == pytest.approx(0.15, abs=1e-9)  # threshold

    def test_aa_zero_eps_matches_ea(self, capsys):
        run_cli("fixedpoint", "--model", "ea", "--alpha", "0.3", "--p", "0.9")
        ea_line = capsys.readouterr().out
        run_cli("fixedpoint", "--model", "aa", "--alpha", "0.3", "--p", "0.9", "--eps", "0")
        aa_line = capsys.readouterr().out
        assert ea_line == aa_line

    def test_json_output(self, capsys):
        assert run_cli(
            "fixedpoint", "--model", "aa", "--alpha", "0.3", "--p", "0.9",
            "--eps", "0.05", "--json",
        ) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["regime"] == "under"
        assert 0 < payload["x_b"] < payload["x_a"]
        assert "separation_bound" in payload

    def test_aa_with_positive_q(self, capsys):
        assert run_cli(
            "fixedpoint", "--model", "aa", "--alpha", "0.3", "--p", "0.9",
            "--q", "0.4", "--eps", "0.2",
        ) == EXIT_OK
        fields = capsys.readouterr().out.split()
        assert float(fields[0]) == pytest.approx(0.6333333333333333, abs=1e-8)


class TestBounds:
    def test_t_eta_value(self, capsys):
        assert run_cli(
            "bounds", "t-eta", "--alpha", "0.3", "--p", "0.9", "--q", "0.4",
            "--n", "65000", "--delta0", "0.8", "--eta", "0.05", "--omega", "0.05",
        ) == EXIT_OK
        assert capsys.readouterr().out.strip() == "57"

    def test_t_eta_small_n_invalid(self, capsys):
        assert run_cli(
            "bounds", "t-eta", "--alpha", "0.3", "--p", "0.9", "--q", "0.4",
            "--n", "100", "--delta0", "0.8", "--eta", "0.05", "--omega", "0.05",
        ) == EXIT_INVALID
        assert "bound invalid" in capsys.readouterr().err

    def test_p_s_and_t_delta(self, capsys):
        assert run_cli(
            "bounds", "p-s", "--alpha", "0.3", "--p", "0.9", "--q", "0.4",
            "--n", "100", "--delta", "0.05",
        ) == EXIT_OK
        ps = float(capsys.readouterr().out)
        assert 0.0 < ps < 1.0
        assert run_cli(
            "bounds", "t-delta", "--alpha", "0.1", "--p", "0.9", "--q", "0.4",
            "--n", "10", "--delta", "0.1", "--omega", "0.05",
        ) == EXIT_OK
        assert int(capsys.readouterr().out) >= 1


class TestExperiment:
    def test_list(self, capsys):
        assert run_cli("experiment", "--list") == EXIT_OK
        names = capsys.readouterr().out.split()
        assert "fig1" in names and "desk-fig9" in names

    def test_unknown_preset_exits_2(self, tmp_path):
        assert run_cli("experiment", "fig99", "--out", str(tmp_path)) == EXIT_INVALID

    def test_missing_name_exits_2(self, tmp_path):
        assert run_cli("experiment", "--out", str(tmp_path)) == EXIT_INVALID

    def test_runs_preset_with_overrides(self, tmp_path, capsys):
        assert run_cli(
            "experiment", "desk-fig2", "--out", str(tmp_path), "--runs", "3",
        ) == EXIT_OK
        out_path = tmp_path / "desk-fig2.csv"
        assert out_path.exists()
        assert str(out_path) in capsys.readouterr().out

    def test_config_file_overrides(self, tmp_path):
        config = tmp_path / "override.cfg"
        config.write_text(
            "# tiny run\n"
            "n_runs = 2\n"
            "horizon = 20\n"
            "grid.n = 10, 20\n"
            "grid.alpha = 0.1\n"
            'fixed.start = "1,1"\n'
        )
        assert run_cli(
            "experiment", "desk-fig2", "--out", str(tmp_path), "--config", str(config)
        ) == EXIT_OK
        text = (tmp_path / "desk-fig2.csv").read_text()
        assert "# n_runs=2" in text


class TestConfigParsing:
    def test_scalars_lists_and_quotes(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text(
            "n_runs = 7\n"
            "grid.eps = 0.01, 0.02, 0.05\n"
            'fixed.start = "0.2,0.2"\n'
            "fixed.model = aa\n"
        )
        overrides = parse_config_file(str(path))
        assert overrides["n_runs"] == 7
        assert overrides["grid.eps"] == [0.01, 0.02, 0.05]
        assert overrides["fixed.start"] == "0.2,0.2"
        assert overrides["fixed.model"] == "aa"

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("this is not an assignment\n")
        with pytest.raises(InvalidParamsError, match="key = value"):
            parse_config_file(str(path))

    def test_unknown_key_rejected(self):
        spec = preset_spec("desk-fig2")
        with pytest.raises(InvalidParamsError, match="unknown config key"):
            apply_overrides(spec, {"bogus": 1})

    def test_apply_overrides_wraps_scalars(self):
        spec = preset_spec("desk-fig2")
        out = apply_overrides(spec, {"grid.alpha": 0.2, "n_runs": 3})
        assert out.grid["alpha"] == [0.2]
        assert out.n_runs == 3
