"""Audit reports shared by every auditor and serialized by the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = "1.0"

PASS = "pass"
FAIL = "fail"
STATISTICAL_PASS = "statistical-pass"
INCONCLUSIVE = "inconclusive"


def jsonable(obj: Any) -> Any:
    """Convert numpy values and dataclass-like payloads into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if obj is None or isinstance(obj, (str, int, bool)):
        return obj
    return repr(obj)


@dataclass
class Check:
    """One named property checked on ``samples`` inputs.

    ``violations`` counts failing samples; ``worst_case_payload`` holds the
    first offending sample (or, for passing checks, optional diagnostics).
    ``statistical`` marks checks that can only pass by sampling.
    """

    name: str
    samples: int = 0
    violations: int = 0
    worst_case_payload: Any = None
    statistical: bool = False

    def record(self, ok: bool, payload=None) -> bool:
        self.samples += 1
        if not ok:
            self.violations += 1
            if self.worst_case_payload is None:
                self.worst_case_payload = payload
        return ok

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "violations": self.violations,
            "worst_case_payload": jsonable(self.worst_case_payload),
            "statistical": self.statistical,
        }


@dataclass
class AuditReport:
    subject: str
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None
    forced_verdict: str | None = None

    def add(self, name: str, statistical: bool = False) -> Check:
        check = Check(name, statistical=statistical)
        self.checks.append(check)
        return check

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    @property
    def verdict(self) -> str:
        if self.violations:
            return FAIL
        if self.forced_verdict is not None:
            return self.forced_verdict
        if any(c.statistical for c in self.checks):
            return STATISTICAL_PASS
        return PASS

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, STATISTICAL_PASS)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "subject": self.subject,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return dump_json(self.to_json())


def dump_json(payload: Any) -> str:
    return json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"
