# SPDX-License-Identifier: MIT
"""Population-level checks for the sign assumptions on pollutant coefficients and correlations.

All checks use strict positivity: a (partial) correlation counts as positive only
when it exceeds ``sign_tolerance``. Indices are 0-based throughout.
"""

from __future__ import annotations

from collections.abc import Sequence
from itertools import combinations

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field

from biaslab.config import SIGN_TOLERANCE
from biaslab.errors import IndexOutOfRange, PreconditionViolated
from biaslab.linalg import (
    SymMatrix,
    as_symmetric,
    correlation_from_covariance,
    partial_correlation,
    partial_correlation_matrix,
)


class AssumptionProfile(BaseModel):
    """Which sign assumptions a covariance/coefficient instance satisfies."""

    model_config = {"frozen": True}

    no_benefit: bool
    pairwise_pc_plus: bool
    weak_partial_pc_plus: bool | None = Field(
        default=None, description="None when no measured pollutant is designated in Z"
    )
    pairwise_partial_pc_plus: bool
    avg_pairwise_pollutant_corr: float | None = Field(default=None, ge=-1.0, le=1.0)


def check_no_benefit(
    beta_pollutants: npt.ArrayLike, sign_tolerance: float = SIGN_TOLERANCE
) -> bool:
    """True iff every pollutant coefficient is nonpositive (within tolerance)."""
    arr = np.atleast_1d(np.asarray(beta_pollutants, dtype=float))
    return bool(np.all(arr <= sign_tolerance))


def _check_indices(dim: int, indices: Sequence[int]) -> None:
    for idx in indices:
        if not 0 <= idx < dim:
            msg = f"pollutant index {idx} out of range for dimension {dim}"
            raise IndexOutOfRange(msg)


def check_pairwise_pc_plus(
    cov_ZX: SymMatrix,
    pollutant_indices: Sequence[int],
    sign_tolerance: float = SIGN_TOLERANCE,
) -> bool:
    """True iff every distinct pair of pollutants is positively correlated."""
    sym = as_symmetric(cov_ZX, "Cov(Z,X)")
    _check_indices(sym.shape[0], pollutant_indices)
    return all(sym[i, j] > sign_tolerance for i, j in combinations(pollutant_indices, 2))


def check_weak_partial_pc_plus(
    cov_ZX: SymMatrix, p: int, k: int, sign_tolerance: float = SIGN_TOLERANCE
) -> bool:
    """True iff ``Z[k]`` is positively partially correlated with every ``X[j]`` given the rest of ``Z``.

    For each ``j`` the conditioning set is the other ``p - 1`` entries of ``Z``
    only; the remaining pollutants in ``X`` are not conditioned on.
    """
    sym = as_symmetric(cov_ZX, "Cov(Z,X)")
    d = sym.shape[0] - p
    if p < 1 or d < 1:
        msg = f"need p >= 1 and d >= 1, got p={p}, d={d}"
        raise PreconditionViolated(msg)
    _check_indices(p, [k])
    z_idx = list(range(p))
    for j in range(d):
        idx = [*z_idx, p + j]
        sub = sym[np.ix_(idx, idx)]
        if partial_correlation(sub, k, p, name=f"Cov(Z,X[{j}])") <= sign_tolerance:
            return False
    return True


def check_pairwise_partial_pc_plus(
    cov_ZX: SymMatrix, p: int, sign_tolerance: float = SIGN_TOLERANCE
) -> bool:
    """True iff every pair of ``X`` pollutants is positively partially correlated given all else."""
    sym = as_symmetric(cov_ZX, "Cov(Z,X)")
    dim = sym.shape[0]
    if not 0 <= p < dim:
        msg = f"p={p} leaves no pollutant block in a {dim}-square matrix"
        raise PreconditionViolated(msg)
    pcor = partial_correlation_matrix(sym, "Cov(Z,X)")
    block = pcor[p:, p:]
    off = block[~np.eye(dim - p, dtype=bool)]
    return bool(np.all(off > sign_tolerance))


def pollutant_indices(p: int, d: int, measured_pollutant: int | None = None) -> list[int]:
    """Indices into Cov(Z,X) of every pollutant: the designated ``Z`` entry (if any) then all of ``X``."""
    head = [] if measured_pollutant is None else [measured_pollutant]
    return [*head, *range(p, p + d)]


def average_pairwise_correlation(
    cov_ZX: SymMatrix, indices: Sequence[int]
) -> float | None:
    """Mean correlation over distinct pairs drawn from ``indices``; None for fewer than two."""
    if len(indices) < 2:
        return None
    corr = correlation_from_covariance(cov_ZX)
    _check_indices(corr.shape[0], indices)
    values = [corr[i, j] for i, j in combinations(indices, 2)]
    return float(np.mean(values))


def assumption_profile(
    cov_ZX: SymMatrix,
    p: int,
    beta_pollutants: npt.ArrayLike,
    measured_pollutant: int | None = None,
    sign_tolerance: float = SIGN_TOLERANCE,
) -> AssumptionProfile:
    """Evaluate every assumption check on one instance.

    Args:
        cov_ZX: Covariance of ``(Z, X)``.
        p: Number of error-free covariates.
        beta_pollutants: Coefficients of all pollutants (designated ``Z`` entry first).
        measured_pollutant: Index within ``Z`` of a perfectly measured pollutant, if any.
    """
    sym = as_symmetric(cov_ZX, "Cov(Z,X)")
    d = sym.shape[0] - p
    indices = pollutant_indices(p, d, measured_pollutant)
    weak = None
    if measured_pollutant is not None:
        weak = check_weak_partial_pc_plus(sym, p, measured_pollutant, sign_tolerance)
    return AssumptionProfile(
        no_benefit=check_no_benefit(beta_pollutants, sign_tolerance),
        pairwise_pc_plus=check_pairwise_pc_plus(sym, indices, sign_tolerance),
        weak_partial_pc_plus=weak,
        pairwise_partial_pc_plus=check_pairwise_partial_pc_plus(sym, p, sign_tolerance),
        avg_pairwise_pollutant_corr=average_pairwise_correlation(sym, indices),
    )
