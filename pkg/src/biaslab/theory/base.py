# SPDX-License-Identifier: MIT
"""Check result dataclass, per-check tracker, and TheoryCheck protocol."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol, runtime_checkable

if TYPE_CHECKING:
    from biaslab.theory.context import TheoryContext

# Failures reported per check; the rest are counted, not listed.
MAX_REPORTED_FAILURES = 10


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check: a pass summary or one failing instance."""

    check_id: str
    passed: bool
    message: str
    instance: int | None = None
    worst: float | None = None


@dataclass
class CheckTracker:
    """Collects failures and the worst observed deviation while a check runs."""

    check_id: str
    worst: float = 0.0
    n_failed: int = 0
    failures: list[CheckResult] = field(default_factory=list)

    def observe(self, deviation: float) -> None:
        self.worst = max(self.worst, deviation)

    def fail(self, instance: int, message: str, value: float | None = None) -> None:
        self.n_failed += 1
        if len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(
                CheckResult(self.check_id, False, message, instance=instance, worst=value)
            )

    def results(self, n_instances: int) -> list[CheckResult]:
        if n_instances == 0:
            return []
        if self.failures:
            if self.n_failed > len(self.failures):
                extra = self.n_failed - len(self.failures)
                self.failures.append(
                    CheckResult(self.check_id, False, f"... and {extra} more failing instances")
                )
            return self.failures
        return [
            CheckResult(
                self.check_id, True, f"{n_instances} instances passed", worst=self.worst
            )
        ]


@runtime_checkable
class TheoryCheck(Protocol):
    """Protocol that every theory check must satisfy."""

    id: str
    description: str

    def run(self, ctx: TheoryContext) -> list[CheckResult]: ...
