"""Verification reports with a deterministic, lossless JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .scalars import FieldScalar

EXACT_ZERO = "EXACT_ZERO"
RANK_OK = "RANK_OK"
MATCH = "MATCH"
FINDING = "FINDING"
STATUSES = (EXACT_ZERO, RANK_OK, MATCH, FINDING)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, FieldScalar):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass
class CheckRecord:
    check_id: str
    status: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status != FINDING

    def to_json(self) -> dict:
        return {"check_id": self.check_id, "status": self.status, "details": to_jsonable(self.details)}


@dataclass
class VerificationReport:
    command: str
    parameters: dict
    checks: list[CheckRecord] = field(default_factory=list)
    findings: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def check(self, check_id: str) -> CheckRecord:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_json(self) -> dict:
        from . import __version__

        return {
            "tool": "kdirac",
            "version": __version__,
            "command": self.command,
            "parameters": to_jsonable(self.parameters),
            "status": "PASS" if self.passed else FINDING,
            "checks": [c.to_json() for c in self.checks],
            "findings": to_jsonable(self.findings),
            "notes": to_jsonable(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        width = max((len(c.check_id) for c in self.checks), default=5)
        lines = [f"{self.command}  " + " ".join(f"{k}={v}" for k, v in self.parameters.items())]
        for c in self.checks:
            lines.append(f"  {c.check_id:<{width}}  {c.status}")
        for f in self.findings:
            lines.append(f"  finding: {f.get('summary', f)}")
        lines.append("PASS" if self.passed else "FINDING")
        return "\n".join(lines)
