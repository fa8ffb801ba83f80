# SPDX-License-Identifier: MIT
"""Large-sample OLS oracle: empirical coefficient drift on simulated Gaussian data.

Draws ``(Z, X, W)`` jointly Gaussian with the assembled block covariance, builds
``Y = Z beta_Z + X beta_X + eps`` with ``eps ~ N(0, 1)`` independent of
everything, then fits intercept-included OLS of ``Y`` on ``Z`` and on ``(Z, W)``.
The fitted coefficients minus ``beta`` converge to the OVB and MEB formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from biaslab.bias import CoefficientVector, CovarianceBlocks
from biaslab.linalg import Vector


@dataclass(frozen=True, eq=False)
class OracleDrift:
    ovb: Vector
    meb_full: Vector
    n: int


def _ols_slopes(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    with_intercept = np.column_stack([np.ones(design.shape[0]), design])
    coef, *_ = np.linalg.lstsq(with_intercept, y, rcond=None)
    return np.asarray(coef[1:])


def simulate_ols_drift(
    blocks: CovarianceBlocks,
    beta: CoefficientVector,
    n: int,
    rng: np.random.Generator,
) -> OracleDrift:
    """Empirical ``(ovb, meb_full)`` from ``n`` simulated observations.

    The joint covariance may be singular (for example ``W = X``), so the draw
    uses an eigendecomposition rather than a Cholesky factor.
    """
    beta.check(blocks)
    p, d = blocks.p, blocks.d
    cov = blocks.assembled()
    draws = rng.multivariate_normal(np.zeros(cov.shape[0]), cov, size=n, method="eigh")
    z = draws[:, :p]
    x = draws[:, p : p + d]
    w = draws[:, p + d :]
    y = z @ beta.beta_Z + x @ beta.beta_X + rng.standard_normal(n)
    omitted = _ols_slopes(z, y) - beta.beta_Z
    measured = _ols_slopes(np.column_stack([z, w]), y) - beta.as_array()
    return OracleDrift(ovb=omitted, meb_full=measured, n=n)
