# SPDX-License-Identifier: MIT
"""Random instance generators for the theory checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from biaslab.bias import CoefficientVector, CovarianceBlocks, CUMEError
from biaslab.linalg import RectMatrix, SymMatrix, Vector, cholesky_inverse
from biaslab.montecarlo import sample_wishart


@dataclass(frozen=True, eq=False)
class CUMEInstance:
    A: SymMatrix
    B: RectMatrix
    D: SymMatrix
    err: CUMEError
    beta_X: Vector

    @property
    def p(self) -> int:
        return int(self.A.shape[0])

    @property
    def d(self) -> int:
        return int(self.D.shape[0])


def random_spd(dim: int, rng: np.random.Generator, ridge: float = 0.1) -> SymMatrix:
    """Wishart draw with mean ``I`` plus a ridge that keeps the condition number moderate."""
    dof = dim + 4
    return sample_wishart(np.eye(dim) / dof, dof, rng) + ridge * np.eye(dim)


def nonpositive_coefficients(d: int, rng: np.random.Generator) -> Vector:
    return -rng.gamma(1.4, 1.0 / 1.6, size=d)


def pairwise_partial_instance(p: int, d: int, rng: np.random.Generator) -> CUMEInstance:
    """CUME instance whose ``Cov(Z, X)`` has every X-pair positively partially correlated.

    A precision matrix with strictly negative X-block off-diagonals and a
    dominant diagonal is positive definite; its inverse is ``Cov(Z, X)``.
    """
    n = p + d
    precision = np.zeros((n, n))
    zz = rng.normal(scale=0.3, size=(p, p))
    precision[:p, :p] = (zz + zz.T) / 2.0
    zx = rng.normal(scale=0.3, size=(p, d))
    precision[:p, p:] = zx
    precision[p:, :p] = zx.T
    xx = -rng.uniform(0.05, 0.5, size=(d, d))
    precision[p:, p:] = (xx + xx.T) / 2.0
    np.fill_diagonal(precision, 0.0)
    np.fill_diagonal(precision, np.abs(precision).sum(axis=1) + rng.uniform(0.5, 1.5, size=n))
    cov = cholesky_inverse(precision, "precision")
    return CUMEInstance(
        A=cov[:p, :p],
        B=cov[:p, p:],
        D=cov[p:, p:],
        err=CUMEError(rng.uniform(0.1, 2.0, size=d)),
        beta_X=nonpositive_coefficients(d, rng),
    )


def weak_partial_instance(
    p: int, d: int, k: int, rng: np.random.Generator
) -> tuple[SymMatrix, RectMatrix, SymMatrix, Vector]:
    """``(A, B, D, beta_X)`` where ``Z[k]`` enters every ``E[X_j | Z]`` with a positive weight.

    ``B = A Gamma`` with ``Gamma[k, :] > 0`` and ``D = Gamma' A Gamma + R`` for a
    random positive definite residual ``R``.
    """
    a = random_spd(p, rng)
    gamma = rng.normal(size=(p, d))
    gamma[k] = np.abs(gamma[k]) + 0.05
    b = a @ gamma
    d_mat = gamma.T @ a @ gamma + random_spd(d, rng)
    return a, b, (d_mat + d_mat.T) / 2.0, nonpositive_coefficients(d, rng)


def general_instance(
    p: int, d: int, rng: np.random.Generator
) -> tuple[CovarianceBlocks, CoefficientVector]:
    """Unstructured ``(Z, X, W)`` covariance with arbitrary-sign coefficients."""
    blocks = CovarianceBlocks.from_full(random_spd(p + 2 * d, rng), p)
    beta = CoefficientVector(beta_Z=rng.normal(size=p), beta_X=rng.normal(size=d))
    return blocks, beta


def berkson_instance(
    p: int, d: int, rng: np.random.Generator
) -> tuple[CovarianceBlocks, CoefficientVector]:
    """``X = W + U`` with ``U`` independent of ``(Z, W)``, so ``B = C`` and ``F = G``."""
    cov_zw = random_spd(p + d, rng)
    a, c, g = cov_zw[:p, :p], cov_zw[:p, p:], cov_zw[p:, p:]
    u = random_spd(d, rng)
    blocks = CovarianceBlocks(A=a, B=c.copy(), C=c, D=g + u, F=g.copy(), G=g)
    beta = CoefficientVector(beta_Z=rng.normal(size=p), beta_X=rng.normal(size=d))
    return blocks, beta
