"""Metric tables with pass/fail thresholds, and cross-run aggregation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .calibration import CI_Z
from .errors import AggregationError

COMPARATORS = {
    ">=": lambda v, t: v >= t,
    "<=": lambda v, t: v <= t,
    "<": lambda v, t: v < t,
    ">": lambda v, t: v > t,
    "==": lambda v, t: v == t,
    "in": lambda v, t: t[0] <= v <= t[1],
}


@dataclass
class Metric:
    name: str
    value: float
    unit: str = ""
    threshold: object = None   # number, [lo, hi] for "in", or None
    comparator: str = ""
    ci95: object = None        # float, "n/a" or None

    @property
    def passed(self):
        if self.threshold is None:
            return None
        return bool(COMPARATORS[self.comparator](self.value, self.threshold))


@dataclass
class Report:
    command: str
    metrics: list = field(default_factory=list)
    series: list = field(default_factory=list)  # names of plot-ready files
    notes: list = field(default_factory=list)

    def add(self, name, value, unit="", threshold=None, comparator="", ci95=None):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"metric {name!r} is not finite")
        self.metrics.append(Metric(name, value, unit, threshold, comparator, ci95))
        return self

    def get(self, name):
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def passed(self):
        return all(m.passed is not False for m in self.metrics)

    def to_dict(self):
        rows = []
        for m in self.metrics:
            row = asdict(m)
            row["passed"] = m.passed
            rows.append(row)
        return {"command": self.command, "passed": self.passed, "metrics": rows,
                "series": list(self.series), "notes": list(self.notes)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        lines = [f"{self.command} report"]
        for m in self.metrics:
            thr = ""
            if m.threshold is not None:
                t = m.threshold
                t = f"[{t[0]:.9g}, {t[1]:.9g}]" if m.comparator == "in" else f"{t:.9g}"
                thr = f"  (threshold {m.comparator} {t}: {'PASS' if m.passed else 'FAIL'})"
            ci = ""
            if m.ci95 is not None:
                ci = f"  +/- {m.ci95}" if isinstance(m.ci95, str) else f"  +/- {m.ci95:.9g}"
            lines.append(f"  {m.name} = {m.value:.9g} {m.unit}{ci}{thr}".rstrip())
        for n in self.notes:
            lines.append(f"  note: {n}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data):
        rep = cls(data["command"], series=list(data.get("series", [])),
                  notes=list(data.get("notes", [])))
        for row in data["metrics"]:
            rep.metrics.append(Metric(row["name"], row["value"], row.get("unit", ""),
                                      row.get("threshold"), row.get("comparator", ""),
                                      row.get("ci95")))
        return rep


def mean_ci(values, z=CI_Z):
    """Mean and normal-approximation 95 % half-width; ``"n/a"`` for one value."""
    v = np.asarray(values, dtype=float)
    if v.size == 1:
        return float(v[0]), "n/a"
    return float(v.mean()), float(z * v.std(ddof=1) / math.sqrt(v.size))


def combine_reports(reports):
    """Cross-run mean and CI of each metric; all reports must share metrics."""
    if not reports:
        raise AggregationError("no reports to combine")
    names = [tuple(m.name for m in r.metrics) for r in reports]
    ref = set(names[0])
    offenders = [i for i, n in enumerate(names) if set(n) != ref]
    commands = {r.command for r in reports}
    if offenders or len(commands) > 1:
        raise AggregationError(
            f"heterogeneous metrics across runs; offending run indices {offenders}, "
            f"commands {sorted(commands)}")
    out = Report("report")
    for m in reports[0].metrics:
        vals = [r.get(m.name).value for r in reports]
        mean, ci = mean_ci(vals)
        out.add(m.name, mean, m.unit, m.threshold, m.comparator, ci)
    out.notes.append(f"{len(reports)} run(s) combined")
    return out
