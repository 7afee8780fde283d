"""Pass/fail records shared by the pencil and Frobenius verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

MAX_WITNESSES = 8


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Witness:
    """A failing component: its (0-based) indices and the nonzero residual."""

    indices: Tuple[Any, ...]
    residual: Any
    context: Optional[Dict[str, Any]] = None


@dataclass
class CheckResult:
    name: str
    status: Status
    witnesses: List[Witness] = field(default_factory=list)
    failures: int = 0
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != Status.FAIL

    @classmethod
    def from_witnesses(cls, name: str, witnesses: Iterable[Witness], note: str = "") -> CheckResult:
        found = list(witnesses)
        status = Status.FAIL if found else Status.PASS
        return cls(name, status, found[:MAX_WITNESSES], len(found), note)

    @classmethod
    def skipped(cls, name: str, note: str) -> CheckResult:
        return cls(name, Status.SKIPPED, note=note)


@dataclass
class CheckSuite:
    """Ordered collection of checks; passes iff no check failed."""

    checks: Dict[str, CheckResult] = field(default_factory=dict)

    def add(self, result: CheckResult) -> CheckResult:
        self.checks[result.name] = result
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name: str) -> CheckResult:
        return self.checks[name]

    def failed(self) -> List[str]:
        return [name for name, c in self.checks.items() if not c.passed]


def nonzero(items: Iterable[Tuple[Tuple[Any, ...], Any]]) -> Iterable[Witness]:
    """Witnesses for every residual that is not zero."""
    for indices, residual in items:
        is_zero = getattr(residual, "is_zero", None)
        if (is_zero() if is_zero is not None else residual == 0):
            continue
        yield Witness(tuple(indices), residual)
