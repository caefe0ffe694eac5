"""Readers for the simulator's CSV interfaces.

Three file shapes are consumed, all produced by the merit-dynamics CLI:

  * long-format result tables
    ``experiment,<cell keys...>,stat_name,mean,stderr,n_runs``
  * trajectories ``t,x_a,x_b,delta,regime,admits_a,admits_b``
  * ability snapshots ``generation,group,ability``

Leading ``# key=value`` comment lines carry metadata. Any schema
mismatch raises :class:`SchemaError` naming the offending column; no
statistics are ever computed here.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field


class SchemaError(ValueError):
    """Input file does not match the documented CSV contract."""


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _read_lines(path: str) -> tuple[dict[str, str], list[list[str]]]:
    metadata: dict[str, str] = {}
    body: list[str] = []
    try:
        with open(path, newline="") as handle:
            for line in handle:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    metadata[key.strip()] = value
                else:
                    body.append(line)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in csv.reader(body) if row]
    if not rows:
        raise SchemaError(f"{path}: no header row")
    return metadata, rows


@dataclass
class ResultTable:
    """Long-format result records plus file metadata."""

    path: str
    metadata: dict[str, str]
    cell_keys: list[str]
    rows: list[dict] = field(default_factory=list)

    def stats(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row["stat_name"] not in seen:
                seen.append(row["stat_name"])
        return seen

    def filtered(self, stat: str) -> list[dict]:
        return [row for row in self.rows if row["stat_name"] == stat]

    def axis_values(self, key: str) -> list:
        values: list = []
        for row in self.rows:
            if row[key] not in values:
                values.append(row[key])
        return values

    def require_stat(self, stat: str) -> list[dict]:
        rows = self.filtered(stat)
        if not rows:
            raise SchemaError(f"{self.path}: no rows for stat_name={stat!r}")
        return rows


def read_results(path: str) -> ResultTable:
    metadata, rows = _read_lines(path)
    header = rows[0]
    tail = ["stat_name", "mean", "stderr", "n_runs"]
    if header[:1] != ["experiment"] or header[-4:] != tail:
        raise SchemaError(
            f"{path}: expected columns experiment,<cell keys...>,{','.join(tail)}, got {header}"
        )
    cell_keys = header[1:-4]
    table = ResultTable(path=path, metadata=metadata, cell_keys=cell_keys)
    for row in rows[1:]:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row width {len(row)} != header width {len(header)}")
        record = {"experiment": row[0]}
        for key, value in zip(cell_keys, row[1 : 1 + len(cell_keys)]):
            record[key] = _parse_scalar(value)
        record["stat_name"] = row[-4]
        record["mean"] = float(row[-3])
        record["stderr"] = float(row[-2])
        record["n_runs"] = int(row[-1])
        table.rows.append(record)
    if not table.rows:
        raise SchemaError(f"{path}: result table has no data rows")
    return table


TRAJECTORY_COLUMNS = ["t", "x_a", "x_b", "delta", "regime", "admits_a", "admits_b"]


@dataclass
class TrajectoryData:
    path: str
    metadata: dict[str, str]
    columns: dict[str, list]


def read_trajectory(path: str) -> TrajectoryData:
    metadata, rows = _read_lines(path)
    header = rows[0]
    for column in TRAJECTORY_COLUMNS:
        if column not in header:
            raise SchemaError(f"{path}: missing trajectory column {column!r}")
    if len(rows) < 2:
        raise SchemaError(f"{path}: trajectory has no data rows")
    columns: dict[str, list] = {name: [] for name in header}
    for row in rows[1:]:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row width {len(row)} != header width {len(header)}")
        for name, value in zip(header, row):
            columns[name].append(value if name == "regime" else _parse_scalar(value))
    return TrajectoryData(path=path, metadata=metadata, columns=columns)


SNAPSHOT_COLUMNS = ["generation", "group", "ability"]


@dataclass
class SnapshotData:
    path: str
    metadata: dict[str, str]
    rows: list[dict]

    def generations(self) -> list[int]:
        seen: list[int] = []
        for row in self.rows:
            if row["generation"] not in seen:
                seen.append(row["generation"])
        return seen

    def abilities(self, generation: int, group: str) -> list[float]:
        return [
            row["ability"]
            for row in self.rows
            if row["generation"] == generation and row["group"] == group
        ]

    def threshold(self, generation: int) -> float | None:
        raw = self.metadata.get(f"admit_threshold_{generation}")
        return None if raw is None else float(raw)


def read_snapshots(path: str) -> SnapshotData:
    metadata, rows = _read_lines(path)
    if rows[0] != SNAPSHOT_COLUMNS:
        raise SchemaError(f"{path}: expected columns {SNAPSHOT_COLUMNS}, got {rows[0]}")
    data = [
        {"generation": int(row[0]), "group": row[1], "ability": float(row[2])}
        for row in rows[1:]
    ]
    if not data:
        raise SchemaError(f"{path}: snapshot file has no data rows")
    return SnapshotData(path=path, metadata=metadata, rows=data)
