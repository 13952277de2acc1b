"""Published comparison tables and trajectory-vs-table metrics."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from .model import Trajectory

# Stored as printed; parsing happens once at import.
_TABLE1_CSV = """\
t,ref10,present
0.051,0.2451,0.227
0.060,0.2237,0.205
0.100,0.1423,0.132
"""

_TABLE2_CSV = """\
t,ref10,present
0.051,1.0000,1.000
0.060,0.9969,0.997
0.080,0.9756,0.977
0.100,0.9350,0.936
0.120,0.8743,0.873
0.140,0.7896,0.783
0.150,0.7356,0.725
0.160,0.6710,0.653
0.180,0.4879,0.440
"""

PRESENT_TOL = 0.005
PRESENT_TOL_STIFF = 0.02
STIFF_ROW_T = 0.180
REF10_TOL = 0.01
REF10_T_MAX = 0.14


class Quantity(enum.Enum):
    SEALED_FACE_CONCENTRATION = "a"
    BOUNDARY_POSITION = "s"


class Column(enum.Enum):
    REF10 = "ref10"
    PRESENT = "present"


@dataclass(frozen=True)
class Row:
    t: float
    ref10: float
    present: float
    printed: tuple[str, str, str]

    def value(self, column: Column) -> float:
        return self.ref10 if column is Column.REF10 else self.present


@dataclass(frozen=True)
class ReferenceTable:
    number: int
    quantity: Quantity
    rows: tuple[Row, ...]

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "ref10", "present"])
        for r in self.rows:
            w.writerow(r.printed)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, number: int, quantity: Quantity) -> "ReferenceTable":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["t", "ref10", "present"]:
            raise ValueError(f"expected header t,ref10,present, got {reader.fieldnames}")
        rows = tuple(
            Row(float(d["t"]), float(d["ref10"]), float(d["present"]),
                (d["t"], d["ref10"], d["present"]))
            for d in reader
        )
        if any(b.t <= a.t for a, b in zip(rows, rows[1:])):
            raise ValueError("table times must be strictly increasing")
        return cls(number, quantity, rows)


def load_tables() -> tuple[ReferenceTable, ReferenceTable]:
    """Return (Table 1: sealed-face concentration, Table 2: boundary position)."""
    return (
        ReferenceTable.from_csv(_TABLE1_CSV, 1, Quantity.SEALED_FACE_CONCENTRATION),
        ReferenceTable.from_csv(_TABLE2_CSV, 2, Quantity.BOUNDARY_POSITION),
    )


def load_table(number: int) -> ReferenceTable:
    if number not in (1, 2):
        raise ValueError(f"no table {number}; choose 1 or 2")
    return load_tables()[number - 1]


def default_tolerance(table: ReferenceTable, column: Column, t: float) -> float | None:
    """Per-row tolerance; ``None`` means the row is shown but not graded."""
    if column is Column.REF10:
        return REF10_TOL if t <= REF10_T_MAX + 1e-12 else None
    if table.quantity is Quantity.BOUNDARY_POSITION and abs(t - STIFF_ROW_T) < 1e-12:
        return PRESENT_TOL_STIFF
    return PRESENT_TOL


@dataclass(frozen=True)
class ComparisonRow:
    t: float
    reference: float
    computed: float | None
    tolerance: float | None

    @property
    def abs_error(self) -> float | None:
        if self.computed is None:
            return None
        return abs(self.reference - self.computed)

    @property
    def graded(self) -> bool:
        return self.tolerance is not None

    @property
    def ok(self) -> bool:
        if not self.graded:
            return True
        return self.computed is not None and self.abs_error <= self.tolerance


@dataclass(frozen=True)
class ComparisonReport:
    table: int
    column: Column
    rows: tuple[ComparisonRow, ...]
    truncated: bool

    @property
    def max_abs_error(self) -> float:
        errs = [r.abs_error for r in self.rows if r.abs_error is not None and r.graded]
        return max(errs) if errs else 0.0

    @property
    def rows_within_tolerance(self) -> int:
        return sum(1 for r in self.rows if r.graded and r.ok)

    @property
    def graded_rows(self) -> int:
        return sum(1 for r in self.rows if r.graded)

    @property
    def passed(self) -> bool:
        return not self.truncated and all(r.ok for r in self.rows)


def compare(
    trajectory: Trajectory,
    table: ReferenceTable,
    column: Column = Column.PRESENT,
    tolerance=default_tolerance,
) -> ComparisonReport:
    """Linearly interpolate the trajectory at the table times and score each row.

    ``tolerance`` is either a number applied to every row or a callable
    ``(table, column, t) -> float | None``. Rows after the end of the
    trajectory get ``computed=None`` and the report is flagged truncated.
    """
    ts = trajectory.t
    ys = trajectory.a if table.quantity is Quantity.SEALED_FACE_CONCENTRATION else trajectory.s
    rows = []
    truncated = False
    for r in table.rows:
        tol = tolerance(table, column, r.t) if callable(tolerance) else tolerance
        if ts[0] - 1e-12 <= r.t <= ts[-1] + 1e-12:
            computed = float(np.interp(r.t, ts, ys))
        else:
            computed = None
            truncated = True
        rows.append(ComparisonRow(r.t, r.value(column), computed, tol))
    return ComparisonReport(table.number, column, tuple(rows), truncated)
