# SPDX-License-Identifier: MIT
"""Checks on the matrix facts the bias results rest on."""

from __future__ import annotations

import numpy as np

from biaslab.linalg import (
    cholesky_inverse,
    is_m_matrix,
    is_positive_definite,
    partial_correlation,
    partial_correlation_matrix,
    schur_complement,
)
from biaslab.theory.base import CheckResult, CheckTracker
from biaslab.theory.context import IDENTITY_TOLERANCE, TheoryContext
from biaslab.theory.instances import random_spd


class MMatrixInverseCheck:
    """The inverse of a nonsingular M-matrix is entrywise nonnegative."""

    id = "m-matrix-inverse"
    description = "M-matrix inverses are entrywise nonnegative"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tol = ctx.tolerances.sign
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            n = int(rng.integers(2, 7))
            off = -rng.uniform(0.0, 1.0, size=(n, n))
            m = (off + off.T) / 2.0
            np.fill_diagonal(m, 0.0)
            np.fill_diagonal(m, np.abs(m).sum(axis=1) + rng.uniform(0.1, 1.0, size=n))
            if not is_m_matrix(m, tol):
                tracker.fail(i, "generated matrix is not an M-matrix")
                continue
            smallest = float(cholesky_inverse(m).min())
            tracker.observe(max(-smallest, 0.0))
            if smallest < -tol:
                tracker.fail(i, f"inverse has negative entry {smallest:.6g}", smallest)
        return tracker.results(ctx.n_instances)


class SchurComplementCheck:
    """The Schur complement of a PD matrix is PD and inverts the trailing precision block."""

    id = "schur-pd"
    description = "Schur complements of PD matrices are PD and match the precision block"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            n = int(rng.integers(2, 8))
            split = int(rng.integers(1, n))
            full = random_spd(n, rng)
            schur = schur_complement(full, split)
            if not is_positive_definite(schur, ctx.tolerances.pd):
                tracker.fail(i, "Schur complement is not positive definite")
                continue
            block = cholesky_inverse(full)[split:, split:]
            gap = float(np.max(np.abs(cholesky_inverse(schur) - block)))
            tracker.observe(gap)
            if gap > IDENTITY_TOLERANCE * max(1.0, float(np.max(np.abs(block)))):
                tracker.fail(i, f"Schur inverse differs from precision block by {gap:.3g}", gap)
        return tracker.results(ctx.n_instances)


class PartialCorrelationSymmetryCheck:
    """Partial correlations are symmetric, bounded by one, and agree entrywise."""

    id = "partial-correlation-symmetry"
    description = "partial correlation matrix is symmetric with entries in [-1, 1]"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            n = int(rng.integers(2, 8))
            full = random_spd(n, rng)
            pcor = partial_correlation_matrix(full)
            a, b = (int(v) for v in rng.choice(n, size=2, replace=False))
            pair_gap = abs(partial_correlation(full, a, b) - partial_correlation(full, b, a))
            entry_gap = abs(partial_correlation(full, a, b) - pcor[a, b])
            gap = max(float(np.max(np.abs(pcor - pcor.T))), pair_gap, entry_gap)
            tracker.observe(gap)
            if gap > IDENTITY_TOLERANCE:
                tracker.fail(i, f"asymmetry {gap:.3g}", gap)
            elif np.any(np.abs(pcor) > 1.0):
                tracker.fail(i, "partial correlation outside [-1, 1]")
        return tracker.results(ctx.n_instances)
