# SPDX-License-Identifier: MIT
"""Synthetic crop-yield panels with known pollutant effects and proxy error.

Within a unit, pollutant levels (in WHO-guideline units) vary around a unit
level with a common linear trend and a fixed within-unit covariance. The proxy
is the monitor value plus classical error, the monitor value minus Berkson
error, or the monitor value itself. Log yield follows the fixed-effects model
with No-Benefit pollutant coefficients, four weather covariates and a trend.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from biaslab.bias import CoefficientVector, CovarianceBlocks, meb_Z, ovb
from biaslab.config import named_rng
from biaslab.linalg import SymMatrix, cholesky_factor, equicorrelation, solve_pd
from biaslab.montecarlo import sample_wishart
from biaslab.panel.dataset import (
    CROP_COLUMN,
    OUTCOME_COLUMN,
    TIME_COLUMN,
    UNIT_COLUMN,
    WEATHER_COLUMNS,
    DatasetManifest,
    PanelDataset,
    monitor_column,
    panel_columns,
    proxy_column,
)
from biaslab.panel.units import WHO_DIVISORS, Pollutant, parse_pollutant
from biaslab.retry import DEFAULT_MAX_RETRIES, retry_generation

log = logging.getLogger(__name__)

ProxyError = Literal["classical", "berkson", "none"]

# Names the generator stream; bootstrap replicates use indexed streams.
PANEL_STREAM = "synth-panel"

DEFAULT_BETA: dict[Pollutant, float] = {
    Pollutant.CO: -0.08,
    Pollutant.NO2: -0.05,
    Pollutant.O3: -0.12,
    Pollutant.PM10: -0.04,
    Pollutant.PM25: -0.06,
    Pollutant.SO2: -0.03,
}


class SynthPanelConfig(BaseModel):
    """Generator settings. Pollutant quantities are in WHO-guideline units."""

    model_config = {"frozen": True, "extra": "forbid"}

    seed: int = Field(default=0, ge=0)
    n_units: int = Field(default=200, ge=2)
    n_years: int = Field(default=18, ge=3)
    start_year: int = 2000
    crops: tuple[str, ...] = ("corn", "soybean")
    pollutants: tuple[Pollutant, ...] = tuple(Pollutant)
    true_beta: dict[Pollutant, float] | None = None
    pollutant_mean: float = 0.6
    pollutant_sd: float = Field(default=0.25, gt=0)
    pollutant_corr: float = Field(default=0.4, lt=1.0)
    unit_effect_sd: float = Field(default=0.3, ge=0)
    pollutant_trend: float = -0.01
    cov_dof: int | None = Field(
        default=None, description="Draw the within-unit covariance from a Wishart with this dof"
    )
    proxy_error: ProxyError = "classical"
    proxy_error_sd: float = Field(default=0.2, ge=0)
    monitor_coverage: float = Field(default=0.8, gt=0, le=1)
    base_log_yield: float = 4.5
    unit_yield_sd: float = Field(default=0.2, ge=0)
    yield_trend: float = 0.01
    weather_beta: tuple[float, float, float, float] = (0.03, -0.02, 0.01, 0.0)
    noise_sd: float = Field(default=0.05, ge=0)
    max_retries: int = Field(default=DEFAULT_MAX_RETRIES, ge=0)

    @field_validator("pollutants", mode="before")
    @classmethod
    def _parse_pollutants(cls, value: Any) -> tuple[Pollutant, ...]:
        return tuple(parse_pollutant(v) for v in value)

    @field_validator("true_beta", mode="before")
    @classmethod
    def _parse_beta_keys(cls, value: Any) -> dict[Pollutant, float] | None:
        if value is None:
            return None
        return {parse_pollutant(k): float(v) for k, v in dict(value).items()}

    @model_validator(mode="after")
    def _check(self) -> SynthPanelConfig:
        k = len(self.pollutants)
        if k < 2 or len(set(self.pollutants)) != k:
            msg = "need at least two distinct pollutants"
            raise ValueError(msg)
        if k > 1 and self.pollutant_corr <= -1.0 / (k - 1):
            msg = f"pollutant_corr={self.pollutant_corr} is not a valid equicorrelation for {k} pollutants"
            raise ValueError(msg)
        if self.cov_dof is not None and self.cov_dof < k:
            msg = f"cov_dof={self.cov_dof} must be >= number of pollutants {k}"
            raise ValueError(msg)
        if self.true_beta is not None:
            extra = set(self.true_beta) - set(self.pollutants)
            if extra:
                msg = f"true_beta names pollutants not generated: {sorted(p.value for p in extra)}"
                raise ValueError(msg)
        if any(b > 0 for b in self.beta().values()):
            msg = "pollutant coefficients must be nonpositive (No Benefit)"
            raise ValueError(msg)
        if not self.crops or len(set(self.crops)) != len(self.crops):
            msg = "crops must be non-empty and distinct"
            raise ValueError(msg)
        return self

    def beta(self) -> dict[Pollutant, float]:
        """Pollutant coefficients per WHO unit, defaulting unlisted pollutants."""
        given = self.true_beta or {}
        return {p: given.get(p, DEFAULT_BETA[p]) for p in self.pollutants}


class SynthPanelManifest(DatasetManifest):
    """Ground truth for a generated panel. Concentration columns are in ug/m^3."""

    config: dict[str, Any]
    pollutants: list[Pollutant]
    true_beta: dict[Pollutant, float]
    within_covariance: list[list[float]]
    proxy_error: ProxyError
    proxy_error_sd: float
    who_divisors: dict[Pollutant, float]

    def beta_vector(self) -> np.ndarray:
        return np.array([self.true_beta[p] for p in self.pollutants])

    def joint_covariances(self) -> tuple[SymMatrix, SymMatrix, SymMatrix]:
        """Within-unit ``(Cov(X), Cov(X, W), Cov(W))`` of monitor values ``X`` and proxies ``W``."""
        latent = np.asarray(self.within_covariance, dtype=np.float64)
        noise = self.proxy_error_sd**2 * np.eye(latent.shape[0])
        if self.proxy_error == "classical":
            return latent, latent, latent + noise
        if self.proxy_error == "berkson":
            return latent + noise, latent, latent
        return latent, latent, latent


@dataclass(frozen=True, eq=False)
class SyntheticPanel:
    dataset: PanelDataset
    manifest: SynthPanelManifest


def _within_covariance(config: SynthPanelConfig, rng: np.random.Generator) -> SymMatrix:
    k = len(config.pollutants)
    base = config.pollutant_sd**2 * equicorrelation(k, config.pollutant_corr)
    if config.cov_dof is None:
        cholesky_factor(base, "within-unit pollutant covariance")
        return base
    dof = config.cov_dof

    def draw() -> SymMatrix:
        cov = sample_wishart(base / dof, dof, rng)
        cholesky_factor(cov, "within-unit pollutant covariance")
        return cov

    def redraw(attempt: int, exc: Exception) -> None:
        log.warning("within-unit covariance draw %d rejected (%s); redrawing", attempt, exc)

    return retry_generation(draw, max_retries=config.max_retries, on_failure=redraw)


def synth_panel(config: SynthPanelConfig, seed: int | None = None) -> SyntheticPanel:
    """Draw a panel from ``config``; ``seed`` overrides ``config.seed``.

    Raises:
        GenerationFailed: If a Wishart within-unit covariance cannot be drawn.
    """
    seed = config.seed if seed is None else seed
    rng = named_rng(seed, PANEL_STREAM)
    n, t_len, k = config.n_units, config.n_years, len(config.pollutants)
    within = _within_covariance(config, rng)
    chol = cholesky_factor(within, "within-unit pollutant covariance")

    trend = np.arange(t_len, dtype=np.float64)
    unit_level = config.pollutant_mean + (config.unit_effect_sd / config.pollutant_sd) * (
        rng.standard_normal((n, k)) @ chol.T
    )
    latent = (
        unit_level[:, None, :]
        + config.pollutant_trend * trend[None, :, None]
        + rng.standard_normal((n, t_len, k)) @ chol.T
    )
    error = config.proxy_error_sd * rng.standard_normal((n, t_len, k))
    if config.proxy_error == "classical":
        monitor, proxy = latent, latent + error
    elif config.proxy_error == "berkson":
        monitor, proxy = latent + error, latent
    else:
        monitor, proxy = latent, latent
    covered = rng.random((n, k)) < config.monitor_coverage
    weather = rng.standard_normal((n, t_len, len(WEATHER_COLUMNS)))

    beta = np.array(list(config.beta().values()))
    signal = monitor @ beta + weather @ np.asarray(config.weather_beta) + config.yield_trend * trend
    n_crops = len(config.crops)
    unit_yield = config.unit_yield_sd * rng.standard_normal((n, n_crops))
    noise = config.noise_sd * rng.standard_normal((n, t_len, n_crops))
    log_yield = config.base_log_yield + unit_yield[:, None, :] + signal[:, :, None] + noise

    # rows ordered by unit, then year, then crop
    n_rows = n * t_len * n_crops
    columns: dict[str, Any] = {
        UNIT_COLUMN: np.repeat([f"u{i:04d}" for i in range(n)], t_len * n_crops),
        TIME_COLUMN: np.tile(np.repeat(config.start_year + np.arange(t_len), n_crops), n),
        CROP_COLUMN: np.tile(np.asarray(config.crops, dtype=object), n * t_len),
        OUTCOME_COLUMN: np.exp(log_yield).reshape(n_rows),
    }
    for p in Pollutant:
        columns[monitor_column(p)] = np.full(n_rows, np.nan)
        columns[proxy_column(p)] = np.full(n_rows, np.nan)
    for j, p in enumerate(config.pollutants):
        divisor = WHO_DIVISORS[p]
        mon = np.where(covered[:, None, j], monitor[:, :, j], np.nan) * divisor
        columns[monitor_column(p)] = np.repeat(mon.reshape(n * t_len), n_crops)
        columns[proxy_column(p)] = np.repeat(proxy[:, :, j].reshape(n * t_len) * divisor, n_crops)
    for j, col in enumerate(WEATHER_COLUMNS):
        columns[col] = np.repeat(weather[:, :, j].reshape(n * t_len), n_crops)
    frame = pd.DataFrame(columns, columns=panel_columns())

    manifest = SynthPanelManifest(
        config=config.model_copy(update={"seed": seed}).model_dump(mode="json"),
        pollutants=list(config.pollutants),
        true_beta=config.beta(),
        within_covariance=within.tolist(),
        proxy_error=config.proxy_error,
        proxy_error_sd=config.proxy_error_sd,
        who_divisors={p: WHO_DIVISORS[p] for p in config.pollutants},
    )
    log.debug("synthetic panel: %d units x %d years x %d crops", n, t_len, n_crops)
    return SyntheticPanel(dataset=PanelDataset.from_frame(frame), manifest=manifest)


def population_biases(
    manifest: SynthPanelManifest, main: str | Pollutant, control: str | Pollutant
) -> tuple[float, float]:
    """Population ``(ovb, meb)`` of the main pollutant's coefficient for one pair.

    The ground-truth regression on the pair estimates the projection ``b_GT`` of
    the full pollutant effect onto the two monitors. The OVB is the bias formula
    for dropping the control with coefficient ``b_GT[control]``; the MEB is the
    bias of the ``Z`` block when the control is replaced by its proxy.

    The MEB is exact when the residual of the pair projection is uncorrelated
    with the control proxy. That holds for classical error, and for Berkson
    error only when the panel has exactly two pollutants.
    """
    pollutants = list(manifest.pollutants)
    m = pollutants.index(parse_pollutant(main))
    c = pollutants.index(parse_pollutant(control))
    cov_x, cov_xw, cov_w = manifest.joint_covariances()
    pair = [m, c]
    b_gt = solve_pd(cov_x[np.ix_(pair, pair)], cov_x[pair, :] @ manifest.beta_vector(), name="Cov(pair)")
    blocks = CovarianceBlocks(
        A=np.array([[cov_x[m, m]]]),
        B=np.array([[cov_x[m, c]]]),
        C=np.array([[cov_xw[m, c]]]),
        D=np.array([[cov_x[c, c]]]),
        F=np.array([[cov_xw[c, c]]]),
        G=np.array([[cov_w[c, c]]]),
    )
    beta = CoefficientVector(beta_Z=b_gt[:1], beta_X=b_gt[1:])
    return float(ovb(blocks, beta)[0]), float(meb_Z(blocks, beta)[0])
