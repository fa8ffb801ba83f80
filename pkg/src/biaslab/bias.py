# SPDX-License-Identifier: MIT
"""Population omitted-variable bias (OVB) and measurement-error bias (MEB).

The joint covariance of ``(Z, X, W)`` is partitioned as::

    Cov([Z; X; W]) = [[A,   B,   C],
                      [B^T, D,   F],
                      [C^T, F^T, G]]

with ``Z`` the ``p`` error-free covariates, ``X`` the ``d`` true pollutant
concentrations and ``W`` their error-prone proxies. Regressing the outcome on
``Z`` alone gives OVB ``A^{-1} B beta_X``; regressing on ``(Z, W)`` gives MEB
``Sigma_M^{-1} Sigma_{M,E} beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from biaslab.config import DEFAULT_TOLERANCES, SIGN_TOLERANCE, Tolerances
from biaslab.errors import DimensionMismatch, PreconditionViolated
from biaslab.linalg import (
    RectMatrix,
    SymMatrix,
    Vector,
    as_rect,
    as_symmetric,
    as_vector,
    cholesky_factor,
    cholesky_inverse,
    schur_complement,
    solve_pd,
)


class BiasSign(StrEnum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


def classify_sign(value: float, sign_tolerance: float = SIGN_TOLERANCE) -> BiasSign:
    """Three-way sign with a zero band of half-width ``sign_tolerance``."""
    if value < -sign_tolerance:
        return BiasSign.NEGATIVE
    if value > sign_tolerance:
        return BiasSign.POSITIVE
    return BiasSign.ZERO


@dataclass(frozen=True, eq=False)
class CovarianceBlocks:
    """Joint covariance of ``(Z, X, W)`` split into the six distinct blocks."""

    A: SymMatrix
    B: RectMatrix
    C: RectMatrix
    D: SymMatrix
    F: RectMatrix
    G: SymMatrix

    def __post_init__(self) -> None:
        a = as_symmetric(self.A, "A")
        p = a.shape[0]
        d_mat = as_symmetric(self.D, "D")
        d = d_mat.shape[0]
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "D", d_mat)
        object.__setattr__(self, "G", _sym_of_size(self.G, d, "G"))
        object.__setattr__(self, "B", as_rect(self.B, p, d, "B"))
        object.__setattr__(self, "C", as_rect(self.C, p, d, "C"))
        object.__setattr__(self, "F", as_rect(self.F, d, d, "F"))

    @property
    def p(self) -> int:
        return int(self.A.shape[0])

    @property
    def d(self) -> int:
        return int(self.D.shape[0])

    @classmethod
    def from_full(cls, full: npt.ArrayLike, p: int) -> CovarianceBlocks:
        """Split an assembled ``(p + 2d)``-square covariance into blocks."""
        sym = as_symmetric(full, "Cov(Z,X,W)")
        rest = sym.shape[0] - p
        if p < 1 or rest < 2 or rest % 2:
            msg = f"cannot split a {sym.shape[0]}-square matrix with p={p} into (Z, X, W)"
            raise DimensionMismatch(msg)
        d = rest // 2
        z, x, w = slice(0, p), slice(p, p + d), slice(p + d, p + 2 * d)
        return cls(
            A=sym[z, z], B=sym[z, x], C=sym[z, w], D=sym[x, x], F=sym[x, w], G=sym[w, w]
        )

    def assembled(self) -> SymMatrix:
        """The full ``(p + 2d)``-square covariance of ``(Z, X, W)``."""
        full = np.block(
            [
                [self.A, self.B, self.C],
                [self.B.T, self.D, self.F],
                [self.C.T, self.F.T, self.G],
            ]
        )
        return (full + full.T) / 2.0

    def cov_zx(self) -> SymMatrix:
        return np.block([[self.A, self.B], [self.B.T, self.D]])

    def cov_zw(self) -> SymMatrix:
        """``Sigma_M``: covariance of the measured regressors ``(Z, W)``."""
        return np.block([[self.A, self.C], [self.C.T, self.G]])

    def cross_measured_error(self) -> RectMatrix:
        """``Sigma_{M,E} = Cov((Z, W), (Z, X) - (Z, W)) = [[0, B - C], [0, F^T - G]]``."""
        p, d = self.p, self.d
        top = np.hstack([np.zeros((p, p)), self.B - self.C])
        bottom = np.hstack([np.zeros((d, p)), self.F.T - self.G])
        return np.vstack([top, bottom])

    def validate(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
        """Check that Cov(Z,X) and Cov(Z,W) are positive definite.

        Raises:
            NotPositiveDefinite: Naming whichever submatrix fails.
        """
        cholesky_factor(self.cov_zx(), "Cov(Z,X)", tolerances.pd)
        cholesky_factor(self.cov_zw(), "Cov(Z,W)", tolerances.pd)


def _sym_of_size(m: npt.ArrayLike, size: int, name: str) -> SymMatrix:
    sym = as_symmetric(m, name)
    if sym.shape[0] != size:
        msg = f"{name} must be {size}x{size}, got {sym.shape}"
        raise DimensionMismatch(msg)
    return sym


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Population coefficients on ``Z`` (length p) and ``X`` (length d)."""

    beta_Z: Vector
    beta_X: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta_Z", np.atleast_1d(np.asarray(self.beta_Z, dtype=float)))
        object.__setattr__(self, "beta_X", np.atleast_1d(np.asarray(self.beta_X, dtype=float)))

    def as_array(self) -> Vector:
        return np.concatenate([self.beta_Z, self.beta_X])

    def check(self, blocks: CovarianceBlocks) -> None:
        as_vector(self.beta_Z, blocks.p, "beta_Z")
        as_vector(self.beta_X, blocks.d, "beta_X")


@dataclass(frozen=True, eq=False)
class CUMEError:
    """Classical, uncorrelated measurement error: ``Sigma_E = diag(a)``."""

    a: Vector

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.a, dtype=float)).ravel()
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            msg = "measurement error variances must be finite and nonnegative"
            raise PreconditionViolated(msg)
        object.__setattr__(self, "a", arr)

    @property
    def sigma_e(self) -> SymMatrix:
        return np.diag(self.a)


@dataclass(frozen=True, eq=False)
class BiasReport:
    """OVB, MEB and (under CUME) the Omega decomposition for one instance."""

    ovb: Vector
    meb_full: Vector
    meb_Z: Vector
    omega: SymMatrix | None = None
    attenuation_terms: Vector | None = None
    additive_terms: Vector | None = None
    sign_tolerance: float = field(default=SIGN_TOLERANCE)

    @property
    def meb_X(self) -> Vector:
        return self.meb_full[self.ovb.shape[0] :]

    def signs(self) -> dict[str, list[str]]:
        return {
            "ovb": [classify_sign(v, self.sign_tolerance).value for v in self.ovb],
            "meb_full": [classify_sign(v, self.sign_tolerance).value for v in self.meb_full],
        }


def ovb(blocks: CovarianceBlocks, beta: CoefficientVector) -> Vector:
    """Omitted-variable bias of ``beta_Z`` when ``X`` is dropped: ``A^{-1} B beta_X``."""
    beta.check(blocks)
    return solve_pd(blocks.A, blocks.B @ beta.beta_X, name="A")


def meb_full(blocks: CovarianceBlocks, beta: CoefficientVector) -> Vector:
    """Measurement-error bias of ``(beta_Z, beta_X)`` when ``W`` replaces ``X``."""
    beta.check(blocks)
    rhs = blocks.cross_measured_error() @ beta.as_array()
    return solve_pd(blocks.cov_zw(), rhs, name="Cov(Z,W)")


def meb_Z(blocks: CovarianceBlocks, beta: CoefficientVector) -> Vector:
    """MEB of ``beta_Z`` alone: ``(A - C G^{-1} C^T)^{-1} (B - C G^{-1} F^T) beta_X``.

    Computed from its own closed form rather than by slicing :func:`meb_full`.
    """
    beta.check(blocks)
    g_inv_ct = solve_pd(blocks.G, blocks.C.T, name="G")
    g_inv_ft = solve_pd(blocks.G, blocks.F.T, name="G")
    left = blocks.A - blocks.C @ g_inv_ct
    right = (blocks.B - blocks.C @ g_inv_ft) @ beta.beta_X
    return solve_pd(left, right, name="A - C G^-1 C^T")


def cume_blocks(
    A: npt.ArrayLike, B: npt.ArrayLike, D: npt.ArrayLike, err: CUMEError
) -> CovarianceBlocks:
    """Blocks implied by ``W = X + E`` with ``E`` independent of ``(Z, X, Y)``.

    Then ``C = B``, ``F = D`` and ``G = D + Sigma_E``.

    Raises:
        NotPositiveDefinite: If Cov(Z,X) is not positive definite.
        DimensionMismatch: If ``err`` does not have one variance per pollutant.
    """
    a = as_symmetric(A, "A")
    d_mat = as_symmetric(D, "D")
    b = as_rect(B, a.shape[0], d_mat.shape[0], "B")
    if err.a.shape[0] != d_mat.shape[0]:
        msg = f"CUME error needs {d_mat.shape[0]} variances, got {err.a.shape[0]}"
        raise DimensionMismatch(msg)
    blocks = CovarianceBlocks(A=a, B=b, C=b.copy(), D=d_mat, F=d_mat.copy(), G=d_mat + err.sigma_e)
    cholesky_factor(blocks.cov_zx(), "Cov(Z,X)")
    return blocks


def omega_and_decomposition(
    A: npt.ArrayLike,
    B: npt.ArrayLike,
    D: npt.ArrayLike,
    err: CUMEError,
    beta_X: npt.ArrayLike,
) -> tuple[SymMatrix, Vector, Vector]:
    """``Omega = (Sigma_E + D - B^T A^{-1} B)^{-1}`` and the split of the X-block MEB.

    The X-block MEB under CUME is ``-Omega Sigma_E beta_X``; entry ``j`` splits
    into an attenuation term ``-Omega_jj a_j beta_j`` and an additive term
    ``sum_{j' != j} -Omega_jj' a_j' beta_j'``.

    Returns:
        ``(omega, attenuation, additive)``.
    """
    a = as_symmetric(A, "A")
    d_mat = as_symmetric(D, "D")
    p, d = a.shape[0], d_mat.shape[0]
    b = as_rect(B, p, d, "B")
    beta = as_vector(beta_X, d, "beta_X")
    if err.a.shape[0] != d:
        msg = f"CUME error needs {d} variances, got {err.a.shape[0]}"
        raise DimensionMismatch(msg)
    cov_zx = np.block([[a, b], [b.T, d_mat]])
    schur = schur_complement(cov_zx, p, name="Cov(Z,X)")
    cholesky_factor(schur, "D - B^T A^-1 B")
    omega = cholesky_inverse(err.sigma_e + schur, name="Sigma_E + D - B^T A^-1 B")
    weighted = err.a * beta
    attenuation = -np.diag(omega) * weighted
    off_diagonal = omega - np.diag(np.diag(omega))
    additive = -off_diagonal @ weighted
    return omega, attenuation, additive


def bias_report(
    blocks: CovarianceBlocks,
    beta: CoefficientVector,
    err: CUMEError | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> BiasReport:
    """Evaluate every bias quantity for one instance.

    When ``err`` is given the Omega decomposition is attached; ``blocks`` should
    then come from :func:`cume_blocks` with the same ``err``.
    """
    blocks.validate(tolerances)
    omega = attenuation = additive = None
    if err is not None:
        omega, attenuation, additive = omega_and_decomposition(
            blocks.A, blocks.B, blocks.D, err, beta.beta_X
        )
    return BiasReport(
        ovb=ovb(blocks, beta),
        meb_full=meb_full(blocks, beta),
        meb_Z=meb_Z(blocks, beta),
        omega=omega,
        attenuation_terms=attenuation,
        additive_terms=additive,
        sign_tolerance=tolerances.sign,
    )
