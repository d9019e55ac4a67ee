"""Sweep CSV ingestion with strict schema checking.

The renderer consumes the engine's sweep output through its file interface
only: columns must match the emitting schema exactly, and every plotted
number passes through unmodified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

SWEEP_COLUMNS = ("lambda", "gamma", "xi_per_s", "t_c_s", "xi_tc",
                 "eta_c", "W_dim", "P_dim", "status")


class SchemaError(Exception):
    """Input CSV does not carry the expected sweep schema."""


class EmptySelectionError(Exception):
    """No usable rows remain for the requested figure."""


@dataclass(frozen=True)
class SweepRow:
    lam: float
    gamma: float
    xi_per_s: float
    t_c_s: float
    xi_tc: float
    eta_c: float
    w_dim: float
    p_dim: float
    status: str


@dataclass(frozen=True)
class SweepData:
    rows: tuple[SweepRow, ...]

    @property
    def ok_rows(self) -> tuple[SweepRow, ...]:
        return tuple(r for r in self.rows if r.status == "ok")


def read_sweep_csv(path: str | Path) -> SweepData:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"input CSV not found: {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != SWEEP_COLUMNS:
            missing = set(SWEEP_COLUMNS) - set(header)
            raise SchemaError(
                f"{path}: header {header} does not match the sweep schema"
                + (f" (missing columns: {sorted(missing)})" if missing else "")
            )
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(SWEEP_COLUMNS):
                raise SchemaError(f"{path}:{lineno}: expected "
                                  f"{len(SWEEP_COLUMNS)} fields, got {len(record)}")
            try:
                rows.append(SweepRow(
                    lam=float(record[0]), gamma=float(record[1]),
                    xi_per_s=float(record[2]), t_c_s=float(record[3]),
                    xi_tc=float(record[4]), eta_c=float(record[5]),
                    w_dim=float(record[6]), p_dim=float(record[7]),
                    status=record[8],
                ))
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    return SweepData(rows=tuple(rows))
