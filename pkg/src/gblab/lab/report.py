"""Reports: per-quantity comparisons, scan tables and their JSON/CSV serializations.

JSON layout::

    {"scenario_hash": str, "seed": int, "experiment": str, "scenario": {...},
     "quantities": [{"name", "mean", "stderr", "exact", "z", "pass", "oracle"}],
     "tables": [{"name", "columns", "rows"}], "diagnostics": {...}, "passed": bool}

Floats carry 12 significant digits; non-finite values are written as strings.  Wall
clock time is kept on the in-memory report only, so files are byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

SIG_DIGITS = 12
ROUNDOFF = 1e-12


@dataclass
class Quantity:
    name: str
    mean: float
    stderr: float = 0.0
    exact: float | None = None
    oracle: str = "exact"          # exact | reference | no oracle
    sigma_level: float = 3.0
    abs_tol: float = 0.0
    reference_stderr: float = 0.0

    @property
    def compared(self) -> bool:
        return self.exact is not None

    @property
    def z(self) -> float | None:
        if self.exact is None:
            return None
        diff = self.mean - self.exact
        err = math.hypot(self.stderr, self.reference_stderr)
        if err == 0 and diff == 0:
            return 0.0
        # floor at roundoff: zero-variance integrands are exact only up to double precision
        return diff / max(err, ROUNDOFF * max(1.0, abs(self.exact)))

    @property
    def passed(self) -> bool | None:
        """``|z| <= sigma_level``, or within the declared absolute tolerance."""
        if self.exact is None:
            return None
        return abs(self.z) <= self.sigma_level or abs(self.mean - self.exact) <= self.abs_tol

    def to_dict(self) -> dict:
        d = {"name": self.name, "mean": self.mean, "stderr": self.stderr, "exact": self.exact,
             "z": self.z, "pass": self.passed, "oracle": self.oracle if self.compared else "no oracle"}
        if self.reference_stderr:
            d["reference_stderr"] = self.reference_stderr
        if self.abs_tol:
            d["abs_tol"] = self.abs_tol
        return d


@dataclass
class Table:
    name: str
    columns: Sequence[str]
    rows: list

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": list(self.columns), "rows": [list(r) for r in self.rows]}


@dataclass
class Report:
    scenario: dict
    scenario_hash: str
    seed: int
    experiment: str
    quantities: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    runtime: float = 0.0
    error: str | None = None

    def add(self, q: Quantity) -> Quantity:
        self.quantities.append(q)
        return q

    def quantity(self, name: str) -> Quantity:
        for q in self.quantities:
            if q.name == name:
                return q
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return self.error is None and all(q.passed for q in self.quantities if q.compared)

    def to_dict(self) -> dict:
        d = {"scenario_hash": self.scenario_hash, "seed": self.seed, "experiment": self.experiment,
             "scenario": self.scenario, "quantities": [q.to_dict() for q in self.quantities],
             "tables": [t.to_dict() for t in self.tables], "diagnostics": self.diagnostics,
             "passed": self.passed}
        if self.error is not None:
            d["error"] = self.error
        return d


def _clean(x: Any):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, numbers.Real):
        v = float(x)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return str(x)


def report_json(report: Report) -> str:
    return json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True) + "\n"


def format_number(x) -> str:
    if isinstance(x, numbers.Integral):
        return str(int(x))
    return f"{float(x):.{SIG_DIGITS}g}"


def table_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_number(v) if isinstance(v, numbers.Real) else v for v in row])
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", path: str | Path | None = None) -> str:
    """Serialize ``report``; CSV is only defined for reports carrying a scan table."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        scans = [t for t in report.tables if t.name.startswith("scan")]
        if not scans:
            raise ValueError("CSV output needs a scan table; this report has none")
        text = table_csv(scans[0])
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def load_report(text: str) -> dict:
    return json.loads(text)
