"""
CSV ingestion of observed (income, own-price) elasticity pairs, band coverage
checks against them, and stable text formats for curves and reports.

Record files have the header ``group,bundle,epsilon,eta,omega``; ``omega``
may be left empty. Lines starting with ``#`` are comments. Numbers are always
read and written with ``.`` as the decimal separator.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .core import ElasticityError
from .montecarlo import CredibleBand, ParamDistributions, SimulationConfig, simulate_own_band

RECORD_COLUMNS = ("group", "bundle", "epsilon", "eta", "omega")
CURVE_COLUMNS = ("epsilon", "lower", "median", "upper")
SCHEMA_VERSION = 1


class ParseError(ElasticityError):
    """Malformed input; ``row`` and ``column`` are 1-based (row counts lines)."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class ObservedRecord:
    group: str
    bundle: str
    epsilon: float
    eta_observed: float
    omega: float | None = None

    def __post_init__(self):
        for name in ("epsilon", "eta_observed"):
            if not math.isfinite(getattr(self, name)):
                raise ElasticityError(f"{name} must be finite")
        if self.omega is not None and not 0 < self.omega <= 1:
            raise ElasticityError(f"omega must lie in (0, 1], got {self.omega!r}")


@dataclass(frozen=True)
class CoverageEntry:
    record: ObservedRecord
    lower: float
    median: float
    upper: float
    inside: bool


@dataclass(frozen=True)
class CoverageReport:
    entries: tuple[CoverageEntry, ...]

    @property
    def coverage_fraction(self) -> float:
        if not self.entries:
            return 0.0
        return sum(e.inside for e in self.entries) / len(self.entries)

    def to_dict(self) -> dict:
        return {
            "coverage_fraction": self.coverage_fraction,
            "records": [
                {"group": e.record.group, "bundle": e.record.bundle,
                 "epsilon": e.record.epsilon, "eta": e.record.eta_observed,
                 "omega": e.record.omega, "lower": e.lower, "median": e.median,
                 "upper": e.upper, "inside_band": e.inside}
                for e in self.entries
            ],
        }


def _data_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    lines = text.splitlines()
    rows = csv.reader(lines)
    for lineno, (raw, row) in enumerate(zip(lines, rows), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        yield lineno, [c.strip() for c in row]


def _number(cell: str, row: int, column: int, name: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"{name}: not a number: {cell!r}", row, column) from None
    if not math.isfinite(value):
        raise ParseError(f"{name}: must be finite, got {cell!r}", row, column)
    return value


def _read_text(source: str | TextIO) -> str:
    return source if isinstance(source, str) else source.read()


def parse_records(source: str | TextIO) -> list[ObservedRecord]:
    """Parse a record CSV; raises :class:`ParseError` on the first problem."""
    rows = iter(_data_lines(_read_text(source)))
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("empty file: no header row") from None
    if tuple(h.lower() for h in header) != RECORD_COLUMNS:
        raise ParseError(f"header must be {','.join(RECORD_COLUMNS)}, got {','.join(header)}",
                         lineno)
    records = []
    for lineno, cells in rows:
        if len(cells) != len(RECORD_COLUMNS):
            raise ParseError(f"expected {len(RECORD_COLUMNS)} columns, got {len(cells)}",
                             lineno, min(len(cells), len(RECORD_COLUMNS)) + 1)
        group, bundle = cells[0], cells[1]
        if not group:
            raise ParseError("group is empty", lineno, 1)
        if not bundle:
            raise ParseError("bundle is empty", lineno, 2)
        eps = _number(cells[2], lineno, 3, "epsilon")
        eta = _number(cells[3], lineno, 4, "eta")
        omega = None
        if cells[4]:
            omega = _number(cells[4], lineno, 5, "omega")
            if not 0 < omega <= 1:
                raise ParseError(f"omega must lie in (0, 1], got {cells[4]}", lineno, 5)
        records.append(ObservedRecord(group, bundle, eps, eta, omega))
    if not records:
        raise ParseError("no data rows after the header")
    return records


def coverage(records: Iterable[ObservedRecord], dist: ParamDistributions | None = None,
             config: SimulationConfig | None = None) -> CoverageReport:
    """Check each observed eta against the simulated band at its epsilon.

    Records carrying ``omega`` pin the budget share; the rest draw it from
    ``dist``. Band boundaries count as inside.
    """
    dist = dist or ParamDistributions()
    config = config or SimulationConfig()
    entries = []
    for rec in records:
        d = dist if rec.omega is None else dist.pinned(rec.omega)
        band = simulate_own_band([rec.epsilon], d, config)
        lo, med, hi = float(band.lower[0]), float(band.median[0]), float(band.upper[0])
        entries.append(CoverageEntry(rec, lo, med, hi, lo <= rec.eta_observed <= hi))
    return CoverageReport(tuple(entries))


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def emit_curve(band: CredibleBand) -> str:
    """Band as CSV with 17 significant digits, one row per grid point."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for row in zip(band.grid, band.lower, band.median, band.upper):
        writer.writerow([_fmt(x) for x in row])
    return out.getvalue()


def parse_curve(source: str | TextIO) -> CredibleBand:
    """Inverse of :func:`emit_curve`."""
    rows = iter(_data_lines(_read_text(source)))
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("empty file: no header row") from None
    if tuple(header) != CURVE_COLUMNS:
        raise ParseError(f"header must be {','.join(CURVE_COLUMNS)}", lineno)
    cols: list[list[float]] = [[], [], [], []]
    for lineno, cells in rows:
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", lineno)
        for k, (cell, name) in enumerate(zip(cells, CURVE_COLUMNS)):
            cols[k].append(_number(cell, lineno, k + 1, name))
    grid, lower, median, upper = (np.array(c) for c in cols)
    return CredibleBand(grid, lower, median, upper)


def dump_document(kind: str, payload: dict) -> str:
    """Structured result document (JSON) with a schema version."""
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, **payload}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
