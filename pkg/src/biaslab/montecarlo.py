# SPDX-License-Identifier: MIT
"""Monte Carlo experiment on bias direction under random covariance structures.

Each trial draws a covariance of ``(Z, X, W)`` from a Berkson-classical
mixture (``X = L_X + U_b``, ``W = L_X + U_c``) with Wishart-distributed
latent and error covariances, draws No-Benefit coefficients, and records
which of five bias-direction phenomena occur together with the assumption
profile of ``Cov(Z, X)``.

Trials are independent: trial ``i`` draws from its own Philox stream keyed
by ``(seed, i)``, so results do not depend on chunking or worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, model_validator

from biaslab.assumptions import (
    average_pairwise_correlation,
    check_pairwise_partial_pc_plus,
    check_pairwise_pc_plus,
    check_weak_partial_pc_plus,
    pollutant_indices,
)
from biaslab.bias import CoefficientVector, CovarianceBlocks, meb_full, ovb
from biaslab.config import SIGN_TOLERANCE, substream_rng
from biaslab.errors import GenerationFailed
from biaslab.linalg import SymMatrix, as_symmetric, cholesky_factor
from biaslab.retry import DEFAULT_MAX_RETRIES, retry_generation
from biaslab.tally import SimTally

log = logging.getLogger(__name__)


class SimConfig(BaseModel):
    """Parameters of the bias-direction Monte Carlo experiment."""

    model_config = {"frozen": True, "extra": "forbid"}

    n_trials: int = Field(default=100_000, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    p: int = Field(default=5, ge=1)
    d: int = Field(default=5, ge=1)
    wishart_err_scale: float = Field(default=1.0 / 3.0, gt=0)
    wishart_err_dof: int = 10
    latent_dof: int = 10
    latent_offdiag: float = Field(default=0.2, gt=-1.0, lt=1.0)
    gamma_shape: float = Field(default=1.4, gt=0)
    gamma_rate: float = Field(default=1.6, gt=0)
    n_null_pollutants: int = Field(default=2, ge=0)
    include_z_pollutant: bool = Field(
        default=True, description="Count the measured pollutant Z[p-1] in the average pairwise correlation"
    )
    max_retries: int = Field(default=DEFAULT_MAX_RETRIES, ge=0)
    sign_tolerance: float = Field(default=SIGN_TOLERANCE, ge=0)
    chunk_size: int = Field(default=1_000, ge=1)

    @model_validator(mode="after")
    def _check_dimensions(self) -> SimConfig:
        if self.wishart_err_dof < self.d:
            msg = f"wishart_err_dof={self.wishart_err_dof} must be >= d={self.d}"
            raise ValueError(msg)
        if self.latent_dof < self.p + self.d:
            msg = f"latent_dof={self.latent_dof} must be >= p + d = {self.p + self.d}"
            raise ValueError(msg)
        if self.n_null_pollutants > self.d:
            msg = f"n_null_pollutants={self.n_null_pollutants} exceeds d={self.d}"
            raise ValueError(msg)
        if len(self.pollutant_indices()) < 2:
            msg = "average pairwise correlation needs at least two pollutants"
            raise ValueError(msg)
        return self

    @property
    def measured_pollutant(self) -> int:
        """Index within ``Z`` of the perfectly measured pollutant (the last entry)."""
        return self.p - 1

    def pollutant_indices(self) -> list[int]:
        measured = self.measured_pollutant if self.include_z_pollutant else None
        return pollutant_indices(self.p, self.d, measured)


@dataclass(frozen=True)
class TrialOutcome:
    """Phenomenon flags and assumption profile for one trial."""

    trial_index: int
    phen: tuple[bool, bool, bool, bool, bool]
    phen_weak: tuple[bool, bool, bool, bool, bool]
    avg_rho: float
    pairwise_pc_plus: bool
    weak_partial_pc_plus: bool
    pairwise_partial_pc_plus: bool
    r_squared: tuple[float, ...]
    ovb_pollutant: float

    @property
    def measured_ovb_violated(self) -> bool:
        return self.weak_partial_pc_plus and self.ovb_pollutant > SIGN_TOLERANCE


def sample_wishart(scale: SymMatrix, dof: int, rng: np.random.Generator) -> SymMatrix:
    """Draw from ``Wishart_n(scale, dof)`` by the Bartlett decomposition.

    ``scale = L L^T``; ``T`` is lower triangular with ``T_ii = sqrt(chi2(dof - i))``
    and standard normal entries below the diagonal; the draw is ``L T T^T L^T``.

    Raises:
        NotPositiveDefinite: If ``scale`` is not positive definite.
        ValueError: If ``dof`` is smaller than the dimension.
    """
    lower = cholesky_factor(as_symmetric(scale, "Wishart scale"), "Wishart scale")
    n = lower.shape[0]
    if dof < n:
        msg = f"Wishart dof={dof} must be >= dimension {n}"
        raise ValueError(msg)
    bartlett = np.zeros((n, n))
    bartlett[np.diag_indices(n)] = np.sqrt(rng.chisquare(dof - np.arange(n)))
    rows, cols = np.tril_indices(n, k=-1)
    bartlett[rows, cols] = rng.standard_normal(rows.size)
    factor = lower @ bartlett
    draw = factor @ factor.T
    return (draw + draw.T) / 2.0


def latent_scale(config: SimConfig) -> SymMatrix:
    """``blockdiag(I_{p-1}, (1 - r) I_{d+1} + r 11^T)`` with ``r = latent_offdiag``.

    The correlated block covers the measured pollutant ``Z[p-1]`` and all of ``X``.
    """
    k = config.d + 1
    r = config.latent_offdiag
    scale = np.eye(config.p + config.d)
    start = config.p - 1
    scale[start:, start:] = (1.0 - r) * np.eye(k) + r * np.ones((k, k))
    return scale


def sample_coefficients(config: SimConfig, rng: np.random.Generator) -> CoefficientVector:
    """No-Benefit coefficients: pollutants get ``-Gamma(shape, rate)``, the last
    ``n_null_pollutants`` entries of ``beta_X`` are exactly zero, and the
    non-pollutant ``Z`` coefficients are standard normal (they enter no bias formula).
    """
    n_active = config.d - config.n_null_pollutants
    magnitudes = rng.gamma(config.gamma_shape, 1.0 / config.gamma_rate, size=1 + n_active)
    beta_z = np.empty(config.p)
    beta_z[: config.p - 1] = rng.standard_normal(config.p - 1)
    beta_z[config.p - 1] = -magnitudes[0]
    beta_x = np.zeros(config.d)
    beta_x[:n_active] = -magnitudes[1:]
    return CoefficientVector(beta_Z=beta_z, beta_X=beta_x)


def generate_structure(
    config: SimConfig, rng: np.random.Generator
) -> tuple[CovarianceBlocks, SymMatrix]:
    """Random ``(Z, X, W)`` covariance blocks plus ``Cov(Z, X)``.

    ``Sigma_b, Sigma_c ~ Wishart_d(scale * I, dof)`` independently and
    ``Sigma_L ~ Wishart_{p+d}(V, latent_dof)``; then ``A = Sigma_L[Z,Z]``,
    ``B = C = Sigma_L[Z,X]``, ``D = Sigma_L[X,X] + Sigma_b``, ``F = Sigma_L[X,X]``,
    ``G = Sigma_L[X,X] + Sigma_c``.

    Raises:
        GenerationFailed: If no positive definite structure is drawn within ``max_retries``.
    """
    p, d = config.p, config.d
    err_scale = config.wishart_err_scale * np.eye(d)
    v_mu = latent_scale(config)

    def draw() -> tuple[CovarianceBlocks, SymMatrix]:
        sigma_b = sample_wishart(err_scale, config.wishart_err_dof, rng)
        sigma_c = sample_wishart(err_scale, config.wishart_err_dof, rng)
        sigma_l = sample_wishart(v_mu, config.latent_dof, rng)
        latent_x = sigma_l[p:, p:]
        blocks = CovarianceBlocks(
            A=sigma_l[:p, :p],
            B=sigma_l[:p, p:],
            C=sigma_l[:p, p:],
            D=latent_x + sigma_b,
            F=latent_x,
            G=latent_x + sigma_c,
        )
        blocks.validate()
        return blocks, blocks.cov_zx()

    return retry_generation(draw, max_retries=config.max_retries)


def r_squared(blocks: CovarianceBlocks) -> tuple[float, ...]:
    """Squared correlation between ``W[j]`` and ``X[j]`` for each pollutant."""
    f_diag = np.diag(blocks.F)
    return tuple(float(v) for v in f_diag**2 / (np.diag(blocks.D) * np.diag(blocks.G)))


def evaluate_trial(
    config: SimConfig,
    trial_index: int,
    blocks: CovarianceBlocks,
    cov_zx: SymMatrix,
    beta: CoefficientVector,
) -> TrialOutcome:
    tol = config.sign_tolerance
    p, d = config.p, config.d
    omitted = ovb(blocks, beta)
    measured = meb_full(blocks, beta)
    k = config.measured_pollutant
    values = (omitted[k], measured[k], measured[p + d - 1], measured[p])
    strict = tuple(bool(v < -tol) for v in values)
    weak = tuple(bool(v <= tol) for v in values)
    dominance = bool(abs(omitted[k]) > abs(measured[k]))
    dominance_weak = bool(abs(omitted[k]) >= abs(measured[k]))
    avg_rho = average_pairwise_correlation(cov_zx, config.pollutant_indices())
    assert avg_rho is not None  # SimConfig guarantees two or more pollutants
    return TrialOutcome(
        trial_index=trial_index,
        phen=(*strict, dominance),  # type: ignore[arg-type]
        phen_weak=(*weak, dominance_weak),  # type: ignore[arg-type]
        avg_rho=avg_rho,
        pairwise_pc_plus=check_pairwise_pc_plus(cov_zx, pollutant_indices(p, d, k), tol),
        weak_partial_pc_plus=check_weak_partial_pc_plus(cov_zx, p, k, tol),
        pairwise_partial_pc_plus=check_pairwise_partial_pc_plus(cov_zx, p, tol),
        r_squared=r_squared(blocks),
        ovb_pollutant=float(omitted[k]),
    )


def run_trial(config: SimConfig, trial_index: int) -> TrialOutcome:
    """Generate and evaluate one trial from its own RNG stream.

    Raises:
        GenerationFailed: If the structure draw exhausts its retries.
    """
    rng = substream_rng(config.seed, trial_index)
    blocks, cov_zx = generate_structure(config, rng)
    beta = sample_coefficients(config, rng)
    return evaluate_trial(config, trial_index, blocks, cov_zx, beta)


def _run_chunk(config: SimConfig, start: int, stop: int) -> SimTally:
    tally = SimTally.empty(config.d)
    for trial_index in range(start, stop):
        try:
            outcome = run_trial(config, trial_index)
        except GenerationFailed as exc:
            log.warning("trial %d skipped: %s", trial_index, exc)
            tally.n_failed += 1
            continue
        tally.add(outcome)
    log.debug("trials %d-%d done", start, stop - 1)
    return tally


def run_experiment(config: SimConfig, n_jobs: int = 1) -> SimTally:
    """Run ``config.n_trials`` trials and tally phenomenon frequencies.

    Trials are split into fixed-size chunks independent of ``n_jobs``; chunk
    tallies are merged in chunk order, so the result is identical for any
    worker count.
    """
    bounds = [
        (start, min(start + config.chunk_size, config.n_trials))
        for start in range(0, config.n_trials, config.chunk_size)
    ]
    if n_jobs == 1 or len(bounds) <= 1:
        parts = [_run_chunk(config, start, stop) for start, stop in bounds]
    else:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_run_chunk)(config, start, stop) for start, stop in bounds
        )
    tally = SimTally.empty(config.d)
    for part in parts:
        tally = tally.merge(part)
    if tally.n_failed:
        log.warning("%d of %d trials failed generation", tally.n_failed, config.n_trials)
    return tally
