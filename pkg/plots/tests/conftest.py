import shutil
import subprocess
import sys

import pytest

PRIMARY_CLI = shutil.which("merit-dynamics")


def run_primary(*argv: str) -> None:
    """Invoke the simulator CLI (the only interface this package uses)."""
    if PRIMARY_CLI:
        command = [PRIMARY_CLI, *argv]
    else:
        command = [sys.executable, "-m", "merit_dynamics.cli", *argv]
    subprocess.run(command, check=True, capture_output=True, text=True)


# (preset, extra CLI args) — desk scale so the whole matrix renders quickly.
PRESET_RUNS = [
    ("fig1", []),
    ("desk-fig2", ["--runs", "5"]),
    ("fig3", []),
    ("fig4", []),
    ("desk-fig5", ["--runs", "3", "--horizon", "60"]),
    ("fig6", []),
    ("desk-fig7", ["--runs", "5"]),
    ("desk-fig8", ["--runs", "3"]),
    ("desk-fig9", ["--runs", "5"]),
    ("fig10", []),
    ("desk-fig11", ["--runs", "3", "--horizon", "100"]),
]


@pytest.fixture(scope="session")
def preset_csvs(tmp_path_factory):
    """All figure-preset CSVs, generated once through the simulator CLI."""
    root = tmp_path_factory.mktemp("csvs")
    paths: dict[str, dict[str, object]] = {}
    for preset, extra in PRESET_RUNS:
        out_dir = root / preset
        run_primary("experiment", preset, "--out", str(out_dir), *extra)
        entry: dict[str, object] = {"table": out_dir / f"{preset}.csv"}
        trajectories = sorted(out_dir.glob("trajectory_*.csv"))
        if trajectories:
            entry["trajectories"] = trajectories
        snapshots = sorted(out_dir.glob("snapshot_*.csv"))
        if snapshots:
            entry["snapshots"] = snapshots
        paths[preset] = entry
    return paths
