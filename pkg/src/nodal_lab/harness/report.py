"""Experiment reports: per-trial rows, aggregates, checks and emitters."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError

SCHEMA_VERSION = 1


def clean(value):
    """Plain Python scalars; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(value, dict):
        return {k: clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


def restore(value):
    if isinstance(value, dict):
        return {k: restore(v) for k, v in value.items()}
    if isinstance(value, list):
        return [restore(v) for v in value]
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def _cell(v) -> str:
    v = clean(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    op: str  # "<=" or ">="

    @property
    def passed(self) -> bool:
        if isinstance(self.value, float) and math.isnan(self.value):
            return False
        return self.value <= self.threshold if self.op == "<=" else self.value >= self.threshold

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "threshold": self.threshold, "op": self.op, "passed": self.passed}


@dataclass
class StatReport:
    experiment: str
    config: dict
    columns: list
    rows: list
    aggregates: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "columns": list(self.columns),
            "rows": self.rows,
            "aggregates": self.aggregates,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if include_wall_time:
            d["wall_time"] = self.wall_time
        return clean(d)

    def to_json(self, include_wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_time), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "StatReport":
        d = restore(json.loads(text))
        if d.get("schema_version") != SCHEMA_VERSION:
            raise DataError(f"unsupported report schema {d.get('schema_version')!r}")
        checks = [Check(c["name"], c["value"], c["threshold"], c["op"]) for c in d["checks"]]
        return cls(d["experiment"], d["config"], d["columns"], d["rows"], d["aggregates"], checks, d.get("wall_time", 0.0))

    def to_csv(self) -> str:
        """One line per row in the fixed column order."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(row.get(c, "")) for c in self.columns])
        return buf.getvalue()

    def to_long_csv(self) -> str:
        """Plot-ready long format: trial, seed, row, metric, value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "row", "metric", "value"])
        keys = [c for c in self.columns if c not in ("trial", "seed")]
        counter: dict = {}
        for row in self.rows:
            t = row.get("trial")
            k = counter[t] = counter.get(t, -1) + 1
            for c in keys:
                w.writerow([_cell(t), _cell(row.get("seed")), k, c, _cell(row.get(c, ""))])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{self.experiment}: {'PASS' if self.passed else 'FAIL'} ({len(self.rows)} rows, {self.wall_time:.1f} s)"]
        for c in self.checks:
            lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name}: {c.value!r} {c.op} {c.threshold!r}")
        return "\n".join(lines)


def emit(report: StatReport, out_dir, fmt: str = "csv") -> list:
    """Write the report into ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        stem = out / report.experiment
        if fmt in ("csv", "both"):
            p = stem.with_suffix(".csv")
            p.write_text(report.to_csv())
            q = out / f"{report.experiment}.long.csv"
            q.write_text(report.to_long_csv())
            paths += [p, q]
        if fmt in ("json", "both", "csv"):
            p = stem.with_suffix(".json")
            p.write_text(report.to_json() + "\n")
            paths.append(p)
        if fmt not in ("csv", "json", "both"):
            raise DataError(f"unknown format {fmt!r}")
        return paths
    except OSError as exc:
        raise DataError(f"{out}: {exc}") from exc


def frequency(flags) -> dict:
    """Empirical frequency with its binomial standard error."""
    flags = np.asarray(list(flags), dtype=bool)
    k = flags.size
    if k == 0:
        return {"value": math.nan, "se": math.nan, "count": 0}
    f = float(flags.mean())
    return {"value": f, "se": math.sqrt(f * (1.0 - f) / k), "count": int(k)}


def describe(values) -> dict:
    v = np.asarray([x for x in values if isinstance(x, (int, float)) and math.isfinite(x)], dtype=np.float64)
    if v.size == 0:
        return {"count": 0}
    q = np.quantile(v, [0.05, 0.5, 0.95])
    return {
        "count": int(v.size),
        "mean": float(v.mean()),
        "se": float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan,
        "q05": float(q[0]),
        "median": float(q[1]),
        "q95": float(q[2]),
        "max": float(v.max()),
    }
