# SPDX-License-Identifier: MIT
"""Tests for biaslab.oracle: simulated OLS drift agrees with the closed forms."""

from __future__ import annotations

import numpy as np
import pytest

from biaslab.bias import CoefficientVector, CovarianceBlocks, CUMEError, cume_blocks, meb_full, ovb
from biaslab.cases import case5_example
from biaslab.config import substream_rng
from biaslab.linalg import equicorrelation
from biaslab.montecarlo import sample_wishart
from biaslab.oracle import simulate_ols_drift

N = 200_000


def _unit_scale_instance(seed: int) -> tuple[CovarianceBlocks, CoefficientVector]:
    """One perfectly measured pollutant and two proxied ones, all with unit variance.

    Correlations scatter around 0.2 and coefficients lie in [-0.25, 0], so every
    regressor keeps most of its variance after partialling out the others and the
    outcome noise stays near 1. The OLS sampling error at ``N`` is then about 0.003.
    """
    rng = substream_rng(seed, 0)
    dof = 60
    cov = sample_wishart(equicorrelation(3, 0.2) / dof, dof, rng)
    sd = np.sqrt(np.diag(cov))
    corr = cov / np.outer(sd, sd)
    err = CUMEError(rng.uniform(0.2, 0.5, size=2))
    blocks = cume_blocks(corr[:1, :1], corr[:1, 1:], corr[1:, 1:], err)
    beta = CoefficientVector(beta_Z=-rng.uniform(0.0, 0.25, size=1), beta_X=-rng.uniform(0.0, 0.25, size=2))
    return blocks, beta


class TestOracle:
    def test_cume_drift_matches_formulas(self) -> None:
        blocks = cume_blocks([[1.0]], [[0.3, 0.2]], [[1.0, 0.4], [0.4, 1.0]], CUMEError([0.5, 0.25]))
        beta = CoefficientVector(beta_Z=[-0.2], beta_X=[-1.0, -0.5])
        drift = simulate_ols_drift(blocks, beta, N, substream_rng(1, 0))
        assert drift.n == N
        np.testing.assert_allclose(drift.ovb, ovb(blocks, beta), atol=0.02)
        np.testing.assert_allclose(drift.meb_full, meb_full(blocks, beta), atol=0.02)

    def test_case5_drift(self) -> None:
        blocks, beta = case5_example()
        drift = simulate_ols_drift(blocks, beta, N, substream_rng(2, 0))
        assert abs(float(drift.ovb[0])) < 0.02
        assert abs(float(drift.meb_full[0]) - 0.0257) < 0.02

    def test_no_error_singular_joint_covariance(self) -> None:
        blocks = cume_blocks([[1.0]], [[0.3]], [[1.0]], CUMEError([0.0]))
        beta = CoefficientVector(beta_Z=[0.5], beta_X=[-1.0])
        drift = simulate_ols_drift(blocks, beta, 20_000, substream_rng(3, 0))
        np.testing.assert_allclose(drift.meb_full, [0.0, 0.0], atol=0.05)


class TestRandomInstances:
    @pytest.mark.parametrize("seed", range(20))
    def test_drift_within_one_hundredth(self, seed: int) -> None:
        blocks, beta = _unit_scale_instance(seed)
        drift = simulate_ols_drift(blocks, beta, N, substream_rng(seed, 1))
        np.testing.assert_allclose(drift.ovb, ovb(blocks, beta), rtol=0, atol=0.01)
        np.testing.assert_allclose(drift.meb_full, meb_full(blocks, beta), rtol=0, atol=0.01)
