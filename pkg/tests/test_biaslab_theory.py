# SPDX-License-Identifier: MIT
"""Tests for biaslab.theory: registry, tracker and the randomized checks."""

from __future__ import annotations

import pytest

from biaslab.theory import FAULTS, TheoryCheck, TheoryContext, TheoryEngine
from biaslab.theory.base import MAX_REPORTED_FAILURES, CheckResult, CheckTracker
from biaslab.theory.registry import CHECK_REGISTRY


@pytest.fixture(scope="module")
def default_results() -> list[CheckResult]:
    return TheoryEngine().run(TheoryContext(n_instances=50, seed=0))


class TestRegistry:
    def test_all_checks_registered(self) -> None:
        ids = TheoryEngine().check_ids
        assert len(ids) == 13
        assert len(set(ids)) == 13
        assert "omega-signs" in ids

    def test_checks_satisfy_protocol(self) -> None:
        for cls in CHECK_REGISTRY:
            check = cls()
            assert isinstance(check, TheoryCheck)
            assert check.description

    def test_custom_check_list(self) -> None:
        engine = TheoryEngine(check_classes=CHECK_REGISTRY[:2])
        assert engine.check_ids == [cls.id for cls in CHECK_REGISTRY[:2]]


class TestTracker:
    def test_pass_summary(self) -> None:
        tracker = CheckTracker("demo")
        tracker.observe(0.1)
        tracker.observe(0.05)
        [result] = tracker.results(7)
        assert result.passed
        assert result.worst == 0.1
        assert result.message == "7 instances passed"

    def test_failures_truncated(self) -> None:
        tracker = CheckTracker("demo")
        for i in range(MAX_REPORTED_FAILURES + 2):
            tracker.fail(i, "bad")
        results = tracker.results(20)
        assert len(results) == MAX_REPORTED_FAILURES + 1
        assert not any(r.passed for r in results)
        assert results[-1].message == "... and 2 more failing instances"

    def test_no_instances(self) -> None:
        assert CheckTracker("demo").results(0) == []


class TestChecks:
    def test_everything_passes(self, default_results: list[CheckResult]) -> None:
        failures = TheoryEngine.failures(default_results)
        assert failures == [], [f"{r.check_id}: {r.message}" for r in failures]

    def test_one_result_per_check(self, default_results: list[CheckResult]) -> None:
        assert [r.check_id for r in default_results] == TheoryEngine().check_ids

    def test_reproducible(self, default_results: list[CheckResult]) -> None:
        assert TheoryEngine().run(TheoryContext(n_instances=50, seed=0)) == default_results

    def test_zero_instances(self) -> None:
        assert TheoryEngine().run(TheoryContext(n_instances=0)) == []

    def test_injected_fault_detected(self) -> None:
        ctx = TheoryContext(n_instances=20, seed=1, omega_fn=FAULTS["omega-sign"])
        failed = {r.check_id for r in TheoryEngine.failures(TheoryEngine().run(ctx))}
        assert "omega-signs" in failed
        assert "berkson-zero" not in failed
