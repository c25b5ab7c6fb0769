"""Report dataclasses and their JSON/CSV serialization.

Reports are plain data: every field is derived deterministically from the
inputs (seeds are recorded, no timestamps), so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

__all__ = [
    "DecayReport", "SeminormReport", "HomogeneityReport", "HsReport",
    "write_json", "decay_csv_rows", "write_csv",
]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and obj == float("-inf"):
        return "-inf"
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if hasattr(obj, "item") and not isinstance(obj, (int, float, str, bool)):
        return obj.item()
    return obj


def write_json(payload, path: str) -> None:
    """Atomic, deterministic JSON write."""
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=1)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text + "\n")
    os.replace(tmp, path)


def write_csv(rows, header, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


@dataclass
class DecayReport:
    """Decay evidence: per-derivative shell sups, fitted log-log slopes, and
    a verdict for each requested decay order k."""

    shell_radii: list[float]
    sups: dict[str, list[float]]          # multi-index label -> per-shell sup
    slopes: dict[str, float]              # multi-index label -> fitted slope
    notes: dict[str, str]
    k_max: int
    slope_tolerance: float
    verdicts: dict[int, bool] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.get(k, False) for k in range(1, self.k_max + 1))

    def pass_at(self, k: int) -> bool:
        return bool(self.verdicts.get(k, False))

    @property
    def worst_slope(self) -> float:
        return max(self.slopes.values()) if self.slopes else float("-inf")

    def payload(self) -> dict:
        return {
            "kind": "decay",
            "passed": self.passed,
            "worst_slope": self.worst_slope,
            **{f: getattr(self, f) for f in
               ("shell_radii", "sups", "slopes", "notes", "k_max",
                "slope_tolerance", "verdicts", "meta")},
        }


def decay_csv_rows(report: DecayReport):
    """CSV rows: alpha, beta, shell_radius, sup_value, constant, slope."""
    rows = []
    for label, sups in sorted(report.sups.items()):
        alpha, beta = label.split("|") if "|" in label else ("", label)
        slope = report.slopes.get(label, float("nan"))
        const = max(sups) if sups else 0.0
        for r, s in zip(report.shell_radii, sups):
            rows.append([alpha, beta, r, s, const, slope])
    return rows


@dataclass
class SeminormReport:
    """Measured symbol-estimate constants per derivative pair, with a drift
    verdict across outer shells."""

    order: float
    constants: dict[str, float]
    drift_slopes: dict[str, float]
    shell_radii: list[float]
    shell_constants: dict[str, list[float]]
    drift_tolerance: float
    verdicts: dict[str, bool] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values()) if self.verdicts else False

    def payload(self) -> dict:
        return {"kind": "seminorm", "passed": self.passed,
                **{f: getattr(self, f) for f in
                   ("order", "constants", "drift_slopes", "shell_radii",
                    "shell_constants", "drift_tolerance", "verdicts", "meta")}}


@dataclass
class HomogeneityReport:
    order: float
    violations: dict[str, float]          # str(s) -> max relative violation
    meta: dict = field(default_factory=dict)

    @property
    def max_violation(self) -> float:
        return max(self.violations.values()) if self.violations else 0.0

    def passed(self, tol: float) -> bool:
        return self.max_violation <= tol

    def payload(self) -> dict:
        return {"kind": "homogeneity", "order": self.order,
                "max_violation": self.max_violation,
                "violations": self.violations, "meta": self.meta}


@dataclass
class HsReport:
    """Homogeneous-modulo-Schwartz evidence: one decay report per dilation
    scale; the verdict is their conjunction."""

    order: float
    per_s: dict[str, DecayReport]
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.per_s) and all(r.passed for r in self.per_s.values())

    def payload(self) -> dict:
        return {"kind": "hs", "order": self.order, "passed": self.passed,
                "per_s": {s: r.payload() for s, r in self.per_s.items()},
                "meta": self.meta}
