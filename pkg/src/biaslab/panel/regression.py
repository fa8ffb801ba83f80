# SPDX-License-Identifier: MIT
"""Unit fixed-effects OLS by the within transformation.

The model is ``log(yield_it) = b' x_it + lambda * t + c_i + e_it``. Unit effects
are absorbed by demeaning every column within unit; standard errors are the
classical homoskedastic ones with ``n_obs - n_regressors - n_units`` residual
degrees of freedom.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import pandas as pd

from biaslab.errors import InsufficientData, NotPositiveDefinite, RankDeficient
from biaslab.linalg import cholesky_inverse
from biaslab.panel.dataset import (
    CROP_COLUMN,
    OUTCOME_COLUMN,
    TIME_COLUMN,
    UNIT_COLUMN,
    PanelDataset,
)

TREND = "trend"


@dataclass(frozen=True)
class RegressionFit:
    coefficient: float
    std_error: float
    t_stat: float
    n_obs: int
    n_units: int


@dataclass(frozen=True)
class FEFormula:
    """Outcome crop, ordered regressor columns, and whether to add a linear time trend."""

    crop: str
    regressors: tuple[str, ...]
    include_trend: bool = True

    def names(self) -> list[str]:
        return [*self.regressors, *([TREND] if self.include_trend else [])]


def within_demean(
    values: npt.NDArray[np.float64], unit_codes: npt.NDArray[np.intp]
) -> npt.NDArray[np.float64]:
    """Subtract each unit's column means from its rows.

    Args:
        values: ``(n_obs, k)`` array.
        unit_codes: Dense 0-based unit codes, one per row.
    """
    counts = np.bincount(unit_codes).astype(np.float64)
    means = np.column_stack(
        [np.bincount(unit_codes, weights=col, minlength=counts.size) for col in values.T]
    ) / counts[:, None]
    return np.asarray(values - means[unit_codes])


def _t_stat(coefficient: float, std_error: float) -> float:
    if std_error > 0:
        return coefficient / std_error
    if coefficient == 0:
        return math.nan
    return math.copysign(math.inf, coefficient)


def fit_within(
    frame: pd.DataFrame, regressors: Sequence[str], *, include_trend: bool = True
) -> dict[str, RegressionFit]:
    """Fixed-effects OLS of ``log(yield)`` on ``regressors`` over every row of ``frame``.

    Rows with a missing outcome or regressor are dropped. Units left with a
    single observation are dropped too: they are fit exactly by their own
    effect and carry no information about the slopes.

    Raises:
        InsufficientData: If no residual degrees of freedom remain.
        RankDeficient: If the demeaned design is collinear.
    """
    names = [*regressors, *([TREND] if include_trend else [])]
    rows = frame.dropna(subset=[OUTCOME_COLUMN, *regressors])
    unit_codes, _ = pd.factorize(rows[UNIT_COLUMN], sort=True)
    keep = np.bincount(unit_codes)[unit_codes] > 1
    rows = rows.loc[keep]
    unit_codes, uniques = pd.factorize(rows[UNIT_COLUMN], sort=True)
    n_obs, n_units, k = len(rows), len(uniques), len(names)
    dof = n_obs - k - n_units
    if dof <= 0:
        msg = f"{n_obs} observations in {n_units} units leave no residual dof for {k} regressors"
        raise InsufficientData(msg)

    design = rows[list(regressors)].to_numpy(dtype=np.float64)
    if include_trend:
        years = rows[TIME_COLUMN].to_numpy(dtype=np.float64)
        design = np.column_stack([design, years - years.min()])
    y = np.log(rows[OUTCOME_COLUMN].to_numpy(dtype=np.float64))
    x_dm = within_demean(design, unit_codes)
    y_dm = within_demean(y[:, None], unit_codes)[:, 0]

    rank = int(np.linalg.matrix_rank(x_dm))
    if rank < k:
        raise RankDeficient(names, rank)
    # Unit-norm columns keep X'X well conditioned when regressors differ in scale.
    scale = np.linalg.norm(x_dm, axis=0)
    x_std = x_dm / scale
    try:
        xtx_inv = cholesky_inverse(x_std.T @ x_std, "X'X")
    except NotPositiveDefinite:
        raise RankDeficient(names, rank) from None
    coef_std = xtx_inv @ (x_std.T @ y_dm)
    resid = y_dm - x_std @ coef_std
    sigma2 = float(resid @ resid) / dof
    coef = coef_std / scale
    se = np.sqrt(np.clip(sigma2 * np.diag(xtx_inv), 0.0, None)) / scale
    return {
        name: RegressionFit(
            coefficient=float(coef[i]),
            std_error=float(se[i]),
            t_stat=_t_stat(float(coef[i]), float(se[i])),
            n_obs=n_obs,
            n_units=n_units,
        )
        for i, name in enumerate(names)
    }


def fe_ols(data: PanelDataset | pd.DataFrame, formula: FEFormula) -> dict[str, RegressionFit]:
    """Fit ``formula`` on the rows of ``data`` for ``formula.crop``."""
    frame = data.frame if isinstance(data, PanelDataset) else data
    rows = frame.loc[frame[CROP_COLUMN] == formula.crop]
    return fit_within(rows, formula.regressors, include_trend=formula.include_trend)
