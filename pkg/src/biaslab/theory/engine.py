# SPDX-License-Identifier: MIT
"""Theory engine: instantiates check classes and runs them against a context."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from biaslab.theory.base import CheckResult, TheoryCheck

if TYPE_CHECKING:
    from biaslab.theory.context import TheoryContext

log = logging.getLogger(__name__)


class TheoryEngine:
    """Instantiates checks from the class registry and runs them against a context."""

    def __init__(self, check_classes: list[type[TheoryCheck]] | None = None) -> None:
        from biaslab.theory.registry import CHECK_REGISTRY

        classes = CHECK_REGISTRY if check_classes is None else check_classes
        self._checks: list[TheoryCheck] = [cls() for cls in classes]

    @property
    def check_ids(self) -> list[str]:
        return [check.id for check in self._checks]

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        """Run every check and collect results."""
        results: list[CheckResult] = []
        for check in self._checks:
            found = check.run(ctx)
            log.debug("%s: %d result(s)", check.id, len(found))
            results.extend(found)
        return results

    @staticmethod
    def failures(results: list[CheckResult]) -> list[CheckResult]:
        return [r for r in results if not r.passed]
