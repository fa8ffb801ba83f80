# SPDX-License-Identifier: MIT
"""Closed-form OVB-vs-MEB comparison cases.

Each evaluator builds the corresponding :class:`~biaslab.bias.CovarianceBlocks`
and evaluates it through the generic formulas, so every closed form here is
also a cross-check of :mod:`biaslab.bias`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from biaslab.bias import (
    CoefficientVector,
    CovarianceBlocks,
    CUMEError,
    cume_blocks,
    meb_Z,
    ovb,
)
from biaslab.errors import PreconditionViolated
from biaslab.linalg import Vector, as_symmetric, as_vector, cholesky_factor, solve_pd


def case2_rho_factor(
    A: npt.ArrayLike, B: npt.ArrayLike, sigma_X: float, rho_XW: float
) -> float:
    """Shrinkage factor of MEB relative to OVB when W and Z have no partial correlation given X.

    ``rho(A, B, rho_XW, sigma_X) = (1 - rho_XW^2) (1 + q / (sigma_X^2 / rho_XW^2 - q))``
    with ``q = B^T A^{-1} B``.

    Raises:
        PreconditionViolated: If ``sigma_X^2 <= q`` or ``|rho_XW| > 1``.
    """
    a = as_symmetric(A, "A")
    b = as_vector(B, a.shape[0], "B")
    if not -1.0 <= rho_XW <= 1.0:
        msg = f"rho_XW must lie in [-1, 1], got {rho_XW}"
        raise PreconditionViolated(msg)
    q = float(b @ solve_pd(a, b, name="A"))
    var_x = sigma_X**2
    if var_x <= q:
        msg = f"sigma_X^2 = {var_x:.6g} must exceed B^T A^-1 B = {q:.6g}"
        raise PreconditionViolated(msg)
    if rho_XW == 0.0:
        return 1.0
    return (1.0 - rho_XW**2) * (1.0 + q / (var_x / rho_XW**2 - q))


def case2_blocks(
    A: npt.ArrayLike, B: npt.ArrayLike, sigma_X: float, sigma_W: float, rho_XW: float
) -> CovarianceBlocks:
    """Blocks for ``W = c X + noise`` with noise independent of ``Z``; ``c = rho_XW sigma_W / sigma_X``."""
    a = as_symmetric(A, "A")
    b = as_vector(B, a.shape[0], "B").reshape(-1, 1)
    c = rho_XW * sigma_W / sigma_X
    return CovarianceBlocks(
        A=a,
        B=b,
        C=c * b,
        D=np.array([[sigma_X**2]]),
        F=np.array([[rho_XW * sigma_X * sigma_W]]),
        G=np.array([[sigma_W**2]]),
    )


@dataclass(frozen=True)
class ScalarCaseReport:
    ovb: float
    meb: float
    dominance_guaranteed: bool


def case3_blocks(
    sigma_Z: float,
    sigma_X: float,
    sigma_W: float,
    rho_ZX: float,
    rho_ZW: float,
    rho_XW: float,
) -> CovarianceBlocks:
    """Scalar ``p = d = 1`` blocks from standard deviations and correlations.

    Raises:
        NotPositiveDefinite: If the implied 3x3 correlation matrix is not positive definite.
    """
    corr = np.array(
        [[1.0, rho_ZX, rho_ZW], [rho_ZX, 1.0, rho_XW], [rho_ZW, rho_XW, 1.0]]
    )
    cholesky_factor(corr, "Corr(Z,X,W)")
    return CovarianceBlocks(
        A=np.array([[sigma_Z**2]]),
        B=np.array([[rho_ZX * sigma_Z * sigma_X]]),
        C=np.array([[rho_ZW * sigma_Z * sigma_W]]),
        D=np.array([[sigma_X**2]]),
        F=np.array([[rho_XW * sigma_X * sigma_W]]),
        G=np.array([[sigma_W**2]]),
    )


def case3_scalar_report(
    sigma_Z: float,
    sigma_X: float,
    sigma_W: float,
    rho_ZX: float,
    rho_ZW: float,
    rho_XW: float,
    beta_X: float,
) -> ScalarCaseReport:
    """Closed-form scalar OVB and MEB plus whether ``|MEB| <= |OVB|`` is guaranteed.

    The guarantee holds when ``rho_XW > |rho_ZW| > 0``, ``rho_ZW`` and ``rho_ZX``
    share a sign and ``|rho_ZX| >= |rho_ZW|``.
    """
    case3_blocks(sigma_Z, sigma_X, sigma_W, rho_ZX, rho_ZW, rho_XW)
    omitted = beta_X * sigma_X * rho_ZX / sigma_Z
    measured = beta_X * sigma_X * (rho_ZX - rho_ZW * rho_XW) / (sigma_Z * (1.0 - rho_ZW**2))
    guaranteed = (
        rho_XW > abs(rho_ZW) > 0.0
        and np.sign(rho_ZW) == np.sign(rho_ZX)
        and abs(rho_ZX) >= abs(rho_ZW)
    )
    return ScalarCaseReport(ovb=omitted, meb=measured, dominance_guaranteed=bool(guaranteed))


def classical_limit_check(
    A: npt.ArrayLike,
    B: npt.ArrayLike,
    D: npt.ArrayLike,
    beta: CoefficientVector,
    scale: float,
    direction: npt.ArrayLike | None = None,
) -> tuple[Vector, Vector]:
    """MEB of ``beta_Z`` with classical error ``Sigma_E = scale * direction`` alongside the OVB.

    ``direction`` defaults to the identity. As ``scale`` grows the proxy carries
    no information and the MEB approaches the OVB.

    Returns:
        ``(meb_Z_at_scale, ovb)``.
    """
    if scale < 0:
        msg = f"scale must be nonnegative, got {scale}"
        raise PreconditionViolated(msg)
    d_mat = as_symmetric(D, "D")
    d = d_mat.shape[0]
    if direction is None:
        blocks = cume_blocks(A, B, d_mat, CUMEError(np.full(d, float(scale))))
    else:
        sigma_e = scale * as_symmetric(direction, "direction")
        base = cume_blocks(A, B, d_mat, CUMEError(np.zeros(d)))
        blocks = CovarianceBlocks(
            A=base.A, B=base.B, C=base.C, D=base.D, F=base.F, G=base.D + sigma_e
        )
    return meb_Z(blocks, beta), ovb(blocks, beta)


def case5_example() -> tuple[CovarianceBlocks, CoefficientVector]:
    """One error-free and two error-prone covariates where the OVB cancels but the MEB does not."""
    d_mat = np.array([[1.0, 0.15], [0.15, 1.0]])
    cov_e = np.array([[0.7, 0.05], [0.05, 0.4]])
    b = np.array([[0.2, 0.1]])
    blocks = CovarianceBlocks(A=np.array([[1.0]]), B=b, C=b.copy(), D=d_mat, F=d_mat.copy(), G=d_mat + cov_e)
    beta = CoefficientVector(beta_Z=np.zeros(1), beta_X=np.array([1.0, -2.0]))
    return blocks, beta


def case6_blocks(kappa: float, A: float, B: float, D: float) -> CovarianceBlocks:
    """Blocks for the proxy ``W = X + kappa Z``."""
    cholesky_factor(np.array([[A, B], [B, D]]), "Cov(Z,X)")
    return CovarianceBlocks(
        A=np.array([[A]]),
        B=np.array([[B]]),
        C=np.array([[B + kappa * A]]),
        D=np.array([[D]]),
        F=np.array([[D + kappa * B]]),
        G=np.array([[D + 2.0 * kappa * B + kappa**2 * A]]),
    )


def case6_counterexample(
    kappa: float, A: float, B: float, D: float, beta_X: float
) -> tuple[float, float]:
    """OVB and MEB for ``W = X + kappa Z``; the MEB equals ``-kappa beta_X`` whatever the OVB.

    Returns:
        ``(ovb, meb)`` evaluated through the generic formulas.
    """
    blocks = case6_blocks(kappa, A, B, D)
    beta = CoefficientVector(beta_Z=np.zeros(1), beta_X=np.array([beta_X]))
    return float(ovb(blocks, beta)[0]), float(meb_Z(blocks, beta)[0])
