"""Report model and table/CSV/JSON serialization for the CLI.

Numbers are normalized to strings once, with a fixed locale-free format
(scientific notation outside [1e-4, 1e15]), so the table, CSV and JSON
emitters all carry byte-identical values and reports are reproducible.
Exact integers are never converted through floats.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def format_number(x) -> str:
    """Deterministic decimal rendering; ints exact, floats shortest round-trip."""
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    f = float(x)
    if f == 0:
        return "0"
    if math.isnan(f) or math.isinf(f):
        return repr(f)
    a = abs(f)
    if 1e-4 <= a <= 1e15:
        return np.format_float_positional(f, unique=True, trim="0")
    return np.format_float_scientific(f, unique=True, trim="0")


@dataclass(frozen=True)
class Diagnostic:
    name: str
    passed: bool
    measured: str
    tolerance: str
    detail: str = ""

    @classmethod
    def build(cls, name, passed, measured, tolerance, detail=""):
        return cls(name=name, passed=bool(passed),
                   measured=format_number(measured),
                   tolerance=format_number(tolerance), detail=detail)


@dataclass
class Report:
    command: str
    version: str
    precision_bits: int
    seed: Optional[int] = None
    timestamp: Optional[str] = None
    figure: Optional[str] = None  # path of a rendered figure, if any
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # list of dicts keyed by columns
    diagnostics: list = field(default_factory=list)

    def add_row(self, **values):
        if not self.columns:
            self.columns = list(values)
        self.rows.append({k: format_number(v) for k, v in values.items()})

    @property
    def failed(self) -> bool:
        return any(not d.passed for d in self.diagnostics)

    def metadata(self) -> dict:
        meta = {"command": self.command, "version": self.version,
                "precision_bits": self.precision_bits}
        if self.seed is not None:
            meta["seed"] = self.seed
        if self.timestamp is not None:
            meta["timestamp"] = self.timestamp
        return meta

    # -- serializers ------------------------------------------------------

    def to_json(self) -> str:
        payload = {"metadata": self.metadata()}
        if self.rows:
            payload["rows"] = self.rows
        if self.diagnostics:
            payload["diagnostics"] = [vars(d) for d in self.diagnostics]
        return json.dumps(payload, indent=2, sort_keys=False)

    def to_csv(self) -> str:
        out = io.StringIO()
        for key, value in self.metadata().items():
            out.write(f"# {key}: {value}\n")
        writer = csv.writer(out, lineterminator="\n")
        if self.rows:
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([row.get(c, "") for c in self.columns])
        if self.diagnostics:
            if self.rows:
                out.write("\n")
            writer.writerow(["check", "status", "measured", "tolerance", "detail"])
            for d in self.diagnostics:
                writer.writerow([d.name, "pass" if d.passed else "FAIL",
                                 d.measured, d.tolerance, d.detail])
        return out.getvalue()

    def to_table(self) -> str:
        out = io.StringIO()
        for key, value in self.metadata().items():
            out.write(f"# {key}: {value}\n")
        if self.rows:
            out.write(_render_table(self.columns,
                                    [[r.get(c, "") for c in self.columns]
                                     for r in self.rows]))
        if self.diagnostics:
            if self.rows:
                out.write("\n")
            out.write(_render_table(
                ["check", "status", "measured", "tolerance", "detail"],
                [[d.name, "pass" if d.passed else "FAIL",
                  d.measured, d.tolerance, d.detail]
                 for d in self.diagnostics]))
        return out.getvalue()

    def render(self, output_format: str) -> str:
        if output_format == "json":
            return self.to_json() + "\n"
        if output_format == "csv":
            return self.to_csv()
        if output_format == "table":
            return self.to_table()
        raise ValueError(f"unknown output format {output_format!r}")


def _render_table(columns, rows) -> str:
    widths = [len(c) for c in columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(str(cell)))
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(c).ljust(w)
                               for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
