# SPDX-License-Identifier: MIT
"""Checks on the Omega structure of classical uncorrelated measurement error.

Instances satisfy Pairwise Partial PC+ by construction. ``Omega`` always comes
from ``ctx.omega_fn`` so an injected fault surfaces here.
"""

from __future__ import annotations

import numpy as np

from biaslab.assumptions import check_pairwise_partial_pc_plus
from biaslab.bias import CoefficientVector, CUMEError, cume_blocks, meb_full
from biaslab.theory.base import CheckResult, CheckTracker
from biaslab.theory.context import IDENTITY_TOLERANCE, TheoryContext
from biaslab.theory.instances import CUMEInstance, pairwise_partial_instance


def _instances(ctx: TheoryContext, check_id: str) -> list[CUMEInstance]:
    rng = ctx.rng(check_id)
    out = []
    for _ in range(ctx.n_instances):
        p = int(rng.integers(1, 5))
        out.append(pairwise_partial_instance(p, 3, rng))
    return out


def _x_block_meb(inst: CUMEInstance, err: CUMEError, beta_X: np.ndarray) -> np.ndarray:
    blocks = cume_blocks(inst.A, inst.B, inst.D, err)
    beta = CoefficientVector(beta_Z=np.zeros(inst.p), beta_X=beta_X)
    return meb_full(blocks, beta)[inst.p :]


class OmegaSignsCheck:
    """Diagonal of Omega in ``(0, 1/a_j]``; off-diagonal nonpositive."""

    id = "omega-signs"
    description = "Omega has a positive diagonal bounded by 1/a_j and nonpositive off-diagonal"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tol = ctx.tolerances.sign
        tracker = CheckTracker(self.id)
        for i, inst in enumerate(_instances(ctx, self.id)):
            cov_zx = np.block([[inst.A, inst.B], [inst.B.T, inst.D]])
            if not check_pairwise_partial_pc_plus(cov_zx, inst.p, tol):
                tracker.fail(i, "generated instance does not satisfy Pairwise Partial PC+")
                continue
            omega, _, _ = ctx.omega_fn(inst.A, inst.B, inst.D, inst.err, inst.beta_X)
            diag = np.diag(omega)
            off = omega[~np.eye(inst.d, dtype=bool)]
            upper = 1.0 / inst.err.a + tol
            if np.any(diag <= 0):
                tracker.fail(i, f"Omega diagonal not positive: min {diag.min():.6g}", float(diag.min()))
            elif np.any(diag > upper):
                excess = float(np.max(diag - upper))
                tracker.fail(i, f"Omega diagonal exceeds 1/a_j by {excess:.3g}", excess)
            elif np.any(off > tol):
                tracker.fail(i, f"Omega off-diagonal positive: max {off.max():.6g}", float(off.max()))
            tracker.observe(float(max(off.max(initial=-np.inf), 0.0)))
        return tracker.results(ctx.n_instances)


class DecompositionIdentityCheck:
    """Attenuation plus additive terms reproduce the X-block MEB."""

    id = "decomposition-identity"
    description = "attenuation + additive terms equal the X-block measurement-error bias"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tracker = CheckTracker(self.id)
        for i, inst in enumerate(_instances(ctx, self.id)):
            _, attenuation, additive = ctx.omega_fn(inst.A, inst.B, inst.D, inst.err, inst.beta_X)
            expected = _x_block_meb(inst, inst.err, inst.beta_X)
            gap = float(np.max(np.abs(attenuation + additive - expected)))
            tracker.observe(gap)
            if gap > IDENTITY_TOLERANCE:
                tracker.fail(i, f"decomposition off by {gap:.3g}", gap)
        return tracker.results(ctx.n_instances)


class NoErrorPollutantCheck:
    """A pollutant measured without error has nonpositive MEB under No Benefit."""

    id = "no-error-pollutant"
    description = "MEB of an error-free pollutant is nonpositive"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tol = ctx.tolerances.sign
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id + "/pick")
        for i, inst in enumerate(_instances(ctx, self.id)):
            j = int(rng.integers(inst.d))
            a = inst.err.a.copy()
            a[j] = 0.0
            value = float(_x_block_meb(inst, CUMEError(a), inst.beta_X)[j])
            tracker.observe(max(value, 0.0))
            if value > tol:
                tracker.fail(i, f"MEB of error-free pollutant {j} is {value:.6g}", value)
        return tracker.results(ctx.n_instances)


class NullPollutantCheck:
    """A pollutant with no effect has nonpositive MEB under No Benefit."""

    id = "null-pollutant-sign"
    description = "MEB of a null pollutant is nonpositive"

    def run(self, ctx: TheoryContext) -> list[CheckResult]:
        tol = ctx.tolerances.sign
        tracker = CheckTracker(self.id)
        rng = ctx.rng(self.id + "/pick")
        for i, inst in enumerate(_instances(ctx, self.id)):
            j = int(rng.integers(inst.d))
            beta_x = inst.beta_X.copy()
            beta_x[j] = 0.0
            value = float(_x_block_meb(inst, inst.err, beta_x)[j])
            tracker.observe(max(value, 0.0))
            if value > tol:
                tracker.fail(i, f"MEB of null pollutant {j} is {value:.6g}", value)
        return tracker.results(ctx.n_instances)
