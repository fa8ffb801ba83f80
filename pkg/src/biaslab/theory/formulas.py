# SPDX-License-Identifier: MIT
"""Checks on the OVB and MEB formulas and the closed-form comparison cases."""

from __future__ import annotations

import numpy as np

from biaslab.assumptions import check_weak_partial_pc_plus
from biaslab.bias import CoefficientVector, meb_full, meb_Z, ovb
from biaslab.cases import (
    case2_blocks,
    case2_rho_factor,
    case6_counterexample,
    classical_limit_check,
)
from biaslab.linalg import solve_pd
from biaslab.theory.base import CheckResult, CheckTracker
from biaslab.theory.context import IDENTITY_TOLERANCE, TheoryContext
from biaslab.theory.instances import (
    berkson_instance,
    general_instance,
    nonpositive_coefficients,
    random_spd,
    weak_partial_instance,
)

CLASSICAL_LIMIT_SCALES = (1.0, 1e2, 1e4, 1e6, 1e8)
CLASSICAL_LIMIT_RTOL = 1e-5
# rounding floor when the gap is already at machine precision
_MONOTONE_SLACK = 1e-15


class WeakPartialOvbSignCheck:
    """Under Weak Partial PC+ and No Benefit the measured pollutant's OVB is nonpositive."""

    id = "measured-ovb-sign"
    description = "OVB of the perfectly measured pollutant is nonpositive under Weak Partial PC+"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tol = ctx.tolerances.sign
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            p, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            k = int(rng.integers(p))
            a, b, d_mat, beta_x = weak_partial_instance(p, d, k, rng)
            cov_zx = np.block([[a, b], [b.T, d_mat]])
            if not check_weak_partial_pc_plus(cov_zx, p, k, tol):
                tracker.fail(i, "generated instance does not satisfy Weak Partial PC+")
                continue
            value = float(solve_pd(a, b @ beta_x, name="A")[k])
            tracker.observe(max(value, 0.0))
            if value > tol:
                tracker.fail(i, f"OVB of Z[{k}] is {value:.6g}", value)
        return tracker.results(ctx.n_instances)


class BerksonZeroCheck:
    """Berkson error (``B = C``, ``F = G``) induces no bias in any coefficient."""

    id = "berkson-zero"
    description = "Berkson measurement error gives zero MEB"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            blocks, beta = berkson_instance(int(rng.integers(1, 5)), int(rng.integers(1, 5)), rng)
            worst = float(np.max(np.abs(meb_full(blocks, beta))))
            tracker.observe(worst)
            if worst > IDENTITY_TOLERANCE:
                tracker.fail(i, f"max |MEB| = {worst:.3g}", worst)
        return tracker.results(ctx.n_instances)


class MebConsistencyCheck:
    """The Z-block closed form agrees with the first ``p`` entries of the full MEB."""

    id = "meb-consistency"
    description = "meb_Z equals the Z-block of meb_full"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            blocks, beta = general_instance(int(rng.integers(1, 5)), int(rng.integers(1, 5)), rng)
            gap = float(np.max(np.abs(meb_full(blocks, beta)[: blocks.p] - meb_Z(blocks, beta))))
            tracker.observe(gap)
            if gap > IDENTITY_TOLERANCE:
                tracker.fail(i, f"meb_Z differs from meb_full[:p] by {gap:.3g}", gap)
        return tracker.results(ctx.n_instances)


class ProxyShrinkageCheck:
    """A proxy with no partial correlation to ``Z`` given ``X`` scales the OVB by ``rho`` in ``[0, 1]``."""

    id = "proxy-shrinkage"
    description = "meb_Z equals rho * ovb with rho in [0, 1]"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            p = int(rng.integers(1, 5))
            a = random_spd(p, rng)
            b = rng.normal(scale=0.5, size=p)
            q = float(b @ solve_pd(a, b, name="A"))
            sigma_x = float(np.sqrt(q + rng.uniform(0.5, 2.0)))
            sigma_w = float(rng.uniform(0.5, 2.0))
            rho_xw = float(rng.uniform(-0.95, 0.95))
            factor = case2_rho_factor(a, b, sigma_x, rho_xw)
            blocks = case2_blocks(a, b, sigma_x, sigma_w, rho_xw)
            beta = CoefficientVector(beta_Z=np.zeros(p), beta_X=nonpositive_coefficients(1, rng))
            omitted = ovb(blocks, beta)
            gap = float(np.max(np.abs(meb_Z(blocks, beta) - factor * omitted)))
            scale = max(float(np.max(np.abs(omitted))), 1.0)
            tracker.observe(gap / scale)
            if not 0.0 <= factor <= 1.0:
                tracker.fail(i, f"shrinkage factor {factor:.6g} outside [0, 1]", factor)
            elif gap > IDENTITY_TOLERANCE * scale:
                tracker.fail(i, f"meb_Z differs from rho * ovb by {gap:.3g}", gap)
        return tracker.results(ctx.n_instances)


class ClassicalLimitCheck:
    """As classical error variance grows, the MEB of ``beta_Z`` approaches the OVB."""

    id = "classical-limit"
    description = "meb_Z converges monotonically to ovb as the error variance grows"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            p, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            full = random_spd(p + d, rng, ridge=0.5)
            a, b, d_mat = full[:p, :p], full[:p, p:], full[p:, p:]
            beta = CoefficientVector(beta_Z=np.zeros(p), beta_X=nonpositive_coefficients(d, rng))
            gaps = []
            omitted = np.zeros(p)
            for scale in CLASSICAL_LIMIT_SCALES:
                measured, omitted = classical_limit_check(a, b, d_mat, beta, scale)
                gaps.append(float(np.max(np.abs(measured - omitted))))
            ovb_norm = float(np.max(np.abs(omitted)))
            relative = gaps[-1] / ovb_norm if ovb_norm > 0 else 0.0
            tracker.observe(relative)
            steps = zip(gaps, gaps[1:], strict=False)
            if any(later > earlier + _MONOTONE_SLACK for earlier, later in steps):
                tracker.fail(i, f"gap not monotone over scales: {gaps}")
            elif gaps[-1] > CLASSICAL_LIMIT_RTOL * ovb_norm:
                tracker.fail(i, f"relative gap {relative:.3g} at scale 1e8", relative)
        return tracker.results(ctx.n_instances)


class ProxyContaminationCheck:
    """A proxy ``W = X + kappa Z`` has MEB ``-kappa beta_X`` regardless of the OVB."""

    id = "contaminated-proxy"
    description = "meb equals -kappa * beta_X for W = X + kappa Z"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id)
        for i in range(ctx.n_instances):
            a = float(rng.uniform(0.5, 2.0))
            d = float(rng.uniform(0.5, 2.0))
            b = float(rng.uniform(-0.9, 0.9) * np.sqrt(a * d))
            kappa = float(rng.uniform(-5.0, 5.0))
            beta_x = float(rng.normal())
            _, measured = case6_counterexample(kappa, a, b, d, beta_x)
            gap = abs(measured + kappa * beta_x)
            tracker.observe(gap)
            if gap > IDENTITY_TOLERANCE:
                tracker.fail(i, f"meb {measured:.6g} != -kappa * beta_X = {-kappa * beta_x:.6g}", gap)
        return tracker.results(ctx.n_instances)
