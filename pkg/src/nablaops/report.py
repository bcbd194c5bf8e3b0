"""Check results shared by every verifier.

A report line has the form ``CHECK <id> PASS|FAIL <detail>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable


@dataclass
class Check:
    id: str
    passed: bool
    detail: str = ""
    witness: Any = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = self.detail
        if not self.passed and self.witness is not None and "witness=" not in detail:
            detail = (detail + " " if detail else "") + f"witness={format_witness(self.witness)}"
        return f"CHECK {self.id} {status}" + (f" {detail}" if detail else "")


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, id: str, passed: bool, detail: str = "", witness: Any = None) -> Check:
        c = Check(id, bool(passed), detail, witness)
        self.checks.append(c)
        return c

    def extend(self, other: "Report | Iterable[Check]", prefix: str = "") -> "Report":
        checks = other.checks if isinstance(other, Report) else other
        for c in checks:
            self.checks.append(Check(prefix + c.id, c.passed, c.detail, c.witness))
        return self

    def get(self, id: str) -> Check:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]

    def __bool__(self):
        return self.passed

    def __str__(self):
        return "\n".join(self.lines())


def format_witness(w: Any) -> str:
    if isinstance(w, tuple) and all(isinstance(x, str) for x in w):
        return "(" + ",".join(w) + ")"
    return repr(w).replace(" ", "")
