"""Verification reports and deterministic JSON/CSV formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SIG_DIGITS = 12
_SNAP = 1e-13


def fmt(x: float) -> str:
    x = float(x)
    if math.isfinite(x) and abs(x) < _SNAP:
        x = 0.0
    return f"{x:.{SIG_DIGITS}g}"


def _round(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(fmt(x))


def jsonable(obj):
    """Convert numpy scalars/arrays and dataclass-ish values to rounded JSON data."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n"


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    if not rows:
        return ""
    columns = columns or list(rows[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c)
            if v is None:
                out.append("")
            elif isinstance(v, (bool, np.bool_)):
                out.append(int(v))
            elif isinstance(v, (float, np.floating)):
                out.append(fmt(v))
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()


@dataclass
class Assertion:
    name: str
    passed: bool
    measured: object = None
    bound: object = None

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "measured": self.measured, "bound": self.bound}


@dataclass
class VerificationReport:
    """Outcome of checking one claim on one concrete instance.

    ``verdict`` is ``"pass"`` iff every assertion passed, ``"inconclusive"``
    when a precondition of the claim failed, and ``"fail"`` otherwise.
    """

    claim: str
    inputs: dict = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    preconditions: list[Assertion] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str, passed, measured=None, bound=None) -> bool:
        self.assertions.append(Assertion(name, bool(passed), measured, bound))
        return bool(passed)

    def require(self, name: str, passed, measured=None, bound=None) -> bool:
        self.preconditions.append(Assertion(name, bool(passed), measured, bound))
        return bool(passed)

    @property
    def conclusive(self) -> bool:
        return all(a.passed for a in self.preconditions)

    @property
    def passed(self) -> bool:
        return self.conclusive and all(a.passed for a in self.assertions)

    @property
    def verdict(self) -> str:
        if not self.conclusive:
            return "inconclusive"
        return "pass" if self.passed else "fail"

    def failures(self) -> list[str]:
        return [a.name for a in self.preconditions + self.assertions if not a.passed]

    def to_dict(self) -> dict:
        out = {
            "claim": self.claim,
            "inputs": self.inputs,
            "preconditions": [a.to_dict() for a in self.preconditions],
            "assertions": [a.to_dict() for a in self.assertions],
            "verdict": self.verdict,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out
