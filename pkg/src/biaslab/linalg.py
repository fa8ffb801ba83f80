# SPDX-License-Identifier: MIT
"""Dense symmetric-matrix primitives: Cholesky inversion, Schur complements,
partial correlations and Z-/M-matrix predicates.

Matrices here are small (a few dozen rows at most), so everything is dense
``float64`` numpy arrays. Symmetric inputs are symmetrized exactly on entry so
that ``m[i, j] == m[j, i]`` holds bit-for-bit downstream.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import scipy.linalg

from biaslab.config import PD_TOLERANCE, SIGN_TOLERANCE
from biaslab.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotPositiveDefinite,
    PreconditionViolated,
)

SymMatrix = npt.NDArray[np.float64]
RectMatrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]

# Asymmetry larger than this (relative to the largest entry) is a caller bug, not rounding.
_SYMMETRY_RTOL = 1e-8


def as_symmetric(m: npt.ArrayLike, name: str = "matrix") -> SymMatrix:
    """Validate a square, numerically symmetric matrix and return an exactly symmetric copy."""
    arr = np.array(m, dtype=np.float64, ndmin=2)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        msg = f"{name} must be a non-empty square matrix, got shape {arr.shape}"
        raise DimensionMismatch(msg)
    if not np.all(np.isfinite(arr)):
        msg = f"{name} contains non-finite entries"
        raise DimensionMismatch(msg)
    scale = max(float(np.max(np.abs(arr))), 1.0)
    if float(np.max(np.abs(arr - arr.T))) > _SYMMETRY_RTOL * scale:
        msg = f"{name} is not symmetric"
        raise DimensionMismatch(msg)
    return (arr + arr.T) / 2.0


def as_rect(m: npt.ArrayLike, rows: int, cols: int, name: str = "matrix") -> RectMatrix:
    """Validate a dense ``rows x cols`` matrix."""
    arr = np.array(m, dtype=np.float64, ndmin=2)
    if arr.shape != (rows, cols):
        msg = f"{name} must have shape ({rows}, {cols}), got {arr.shape}"
        raise DimensionMismatch(msg)
    if not np.all(np.isfinite(arr)):
        msg = f"{name} contains non-finite entries"
        raise DimensionMismatch(msg)
    return arr


def as_vector(v: npt.ArrayLike, length: int, name: str = "vector") -> Vector:
    arr = np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel()
    if arr.shape != (length,):
        msg = f"{name} must have length {length}, got {arr.shape[0]}"
        raise DimensionMismatch(msg)
    return arr


def cholesky_factor(
    m: SymMatrix, name: str = "matrix", pd_tolerance: float = PD_TOLERANCE
) -> npt.NDArray[np.float64]:
    """Lower Cholesky factor of ``m`` with a relative pivot floor.

    A pivot is ``L[k, k] ** 2``; any pivot at or below ``pd_tolerance`` times the
    largest diagonal entry of ``m`` is rejected.

    Raises:
        NotPositiveDefinite: If factorization fails or a pivot falls below the floor.
    """
    sym = as_symmetric(m, name)
    floor = pd_tolerance * max(float(np.max(np.diag(sym))), 0.0)
    try:
        lower = scipy.linalg.cholesky(sym, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        pivot_index, pivot = _first_bad_pivot(sym, floor)
        raise NotPositiveDefinite(name, pivot_index, pivot) from None
    pivots = np.diag(lower) ** 2
    bad = np.flatnonzero(pivots <= floor)
    if bad.size or floor <= 0.0:
        idx = int(bad[0]) if bad.size else 0
        raise NotPositiveDefinite(name, idx, float(pivots[idx]))
    return lower


def _first_bad_pivot(sym: SymMatrix, floor: float) -> tuple[int, float]:
    """Run an unblocked Cholesky to locate the first failing pivot for error reporting."""
    n = sym.shape[0]
    lower = np.zeros_like(sym)
    for k in range(n):
        pivot = sym[k, k] - float(lower[k, :k] @ lower[k, :k])
        if pivot <= floor:
            return k, float(pivot)
        lower[k, k] = np.sqrt(pivot)
        lower[k + 1 :, k] = (sym[k + 1 :, k] - lower[k + 1 :, :k] @ lower[k, :k]) / lower[k, k]
    return n - 1, float("nan")


def is_positive_definite(m: SymMatrix, pd_tolerance: float = PD_TOLERANCE) -> bool:
    try:
        cholesky_factor(m, pd_tolerance=pd_tolerance)
    except NotPositiveDefinite:
        return False
    return True


def cholesky_inverse(
    m: SymMatrix, name: str = "matrix", pd_tolerance: float = PD_TOLERANCE
) -> SymMatrix:
    """Inverse of a positive definite matrix via its Cholesky factor.

    Raises:
        NotPositiveDefinite: If ``m`` fails the pivot check.
    """
    lower = cholesky_factor(m, name, pd_tolerance)
    n = lower.shape[0]
    inv = scipy.linalg.cho_solve((lower, True), np.eye(n), check_finite=False)
    return (inv + inv.T) / 2.0


def solve_pd(
    m: SymMatrix, rhs: npt.ArrayLike, name: str = "matrix", pd_tolerance: float = PD_TOLERANCE
) -> npt.NDArray[np.float64]:
    """Solve ``m @ x = rhs`` for positive definite ``m``."""
    lower = cholesky_factor(m, name, pd_tolerance)
    return np.asarray(
        scipy.linalg.cho_solve((lower, True), np.asarray(rhs, dtype=np.float64), check_finite=False)
    )


def schur_complement(full: SymMatrix, block_split: int, name: str = "matrix") -> SymMatrix:
    """Return ``D - B^T A^{-1} B`` for ``full = [[A, B], [B^T, D]]`` with ``A`` of size ``block_split``.

    Raises:
        IndexOutOfRange: If ``block_split`` is not in ``[1, dim)``.
        NotPositiveDefinite: If the leading block ``A`` is not positive definite.
    """
    sym = as_symmetric(full, name)
    dim = sym.shape[0]
    if not 1 <= block_split < dim:
        msg = f"block_split must satisfy 1 <= block_split < {dim}, got {block_split}"
        raise IndexOutOfRange(msg)
    a = sym[:block_split, :block_split]
    b = sym[:block_split, block_split:]
    d = sym[block_split:, block_split:]
    schur = d - b.T @ solve_pd(a, b, name=f"leading block of {name}")
    return (schur + schur.T) / 2.0


def _check_index(dim: int, *indices: int) -> None:
    for idx in indices:
        if not 0 <= idx < dim:
            msg = f"index {idx} out of range for dimension {dim}"
            raise IndexOutOfRange(msg)


def partial_correlation_matrix(full: SymMatrix, name: str = "matrix") -> SymMatrix:
    """All pairwise partial correlations given the remaining variables.

    Entry ``(i, j)`` is ``-P[i, j] / sqrt(P[i, i] P[j, j])`` with ``P = full^{-1}``;
    the diagonal is set to 1.
    """
    precision = cholesky_inverse(full, name)
    scale = 1.0 / np.sqrt(np.diag(precision))
    pcor = -precision * np.outer(scale, scale)
    np.fill_diagonal(pcor, 1.0)
    return np.clip((pcor + pcor.T) / 2.0, -1.0, 1.0)


def partial_correlation(full: SymMatrix, i: int, j: int, name: str = "matrix") -> float:
    """Partial correlation of variables ``i`` and ``j`` given all other variables."""
    dim = np.shape(full)[0]
    _check_index(dim, i, j)
    if i == j:
        msg = "partial_correlation requires two distinct indices"
        raise PreconditionViolated(msg)
    precision = cholesky_inverse(full, name)
    value = -precision[i, j] / np.sqrt(precision[i, i] * precision[j, j])
    return float(np.clip(value, -1.0, 1.0))


def is_z_matrix(m: npt.ArrayLike, sign_tolerance: float = SIGN_TOLERANCE) -> bool:
    """True iff every off-diagonal entry is <= ``sign_tolerance``."""
    arr = np.array(m, dtype=np.float64, ndmin=2)
    off = arr[~np.eye(arr.shape[0], dtype=bool)]
    return bool(np.all(off <= sign_tolerance))


def is_m_matrix(
    m: SymMatrix, sign_tolerance: float = SIGN_TOLERANCE, pd_tolerance: float = PD_TOLERANCE
) -> bool:
    """True iff ``m`` is a Z-matrix and positive definite.

    For symmetric input all eigenvalues are real, so a successful Cholesky
    factorization is equivalent to all eigenvalues being positive.
    """
    return is_z_matrix(m, sign_tolerance) and is_positive_definite(m, pd_tolerance)


def correlation_from_covariance(cov: SymMatrix) -> SymMatrix:
    sym = as_symmetric(cov, "covariance")
    sd = np.sqrt(np.diag(sym))
    if np.any(sd <= 0):
        msg = "covariance has a non-positive variance"
        raise PreconditionViolated(msg)
    corr = sym / np.outer(sd, sd)
    np.fill_diagonal(corr, 1.0)
    return corr


def equicorrelation(dim: int, rho: float) -> SymMatrix:
    """``(1 - rho) I + rho 11^T``."""
    return (1.0 - rho) * np.eye(dim) + rho * np.ones((dim, dim))


def submatrix(m: SymMatrix, indices: Sequence[int]) -> SymMatrix:
    _check_index(m.shape[0], *indices)
    idx = np.asarray(indices, dtype=int)
    return np.asarray(m[np.ix_(idx, idx)])
