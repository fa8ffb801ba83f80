# SPDX-License-Identifier: MIT
"""Tests for biaslab.panel.synthetic: generated panels and their population biases."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd
import pytest

from biaslab.errors import GenerationFailed, NotPositiveDefinite
from biaslab.panel import synthetic
from biaslab.panel.dataset import monitor_column, panel_columns, proxy_column
from biaslab.panel.synthetic import SynthPanelConfig, population_biases, synth_panel
from biaslab.panel.units import Pollutant
from biaslab.panel.validation import Combo, run_triple

SMALL = SynthPanelConfig(
    seed=5,
    n_units=40,
    n_years=8,
    crops=("corn",),
    pollutants=("o3", "pm25"),
    monitor_coverage=1.0,
)


def _large(proxy_error: str) -> SynthPanelConfig:
    return SynthPanelConfig(
        seed=8,
        n_units=2_000,
        n_years=50,
        crops=("corn",),
        pollutants=("o3", "pm25"),
        monitor_coverage=1.0,
        proxy_error=proxy_error,
    )


class TestConfig:
    def test_positive_coefficient_rejected(self) -> None:
        with pytest.raises(ValueError, match="No Benefit"):
            SynthPanelConfig(true_beta={"o3": 0.1})

    def test_duplicate_pollutants(self) -> None:
        with pytest.raises(ValueError, match="distinct"):
            SynthPanelConfig(pollutants=("o3", "O3"))

    def test_cov_dof_too_small(self) -> None:
        with pytest.raises(ValueError, match="cov_dof"):
            SynthPanelConfig(pollutants=("o3", "pm25", "no2"), cov_dof=2)

    def test_beta_for_missing_pollutant(self) -> None:
        with pytest.raises(ValueError, match="not generated"):
            SynthPanelConfig(pollutants=("o3", "pm25"), true_beta={"so2": -0.1})

    def test_beta_defaults(self) -> None:
        beta = SynthPanelConfig(pollutants=("o3", "pm25"), true_beta={"pm2.5": -0.2}).beta()
        assert beta == {Pollutant.O3: -0.12, Pollutant.PM25: -0.2}


class TestGeneration:
    def test_shape_and_columns(self) -> None:
        frame = synth_panel(SMALL).dataset.frame
        assert list(frame.columns) == panel_columns()
        assert len(frame) == 40 * 8
        assert frame[monitor_column("so2")].isna().all()
        assert frame[monitor_column("o3")].notna().all()
        assert (frame["yield"] > 0).all()

    def test_deterministic(self) -> None:
        pd.testing.assert_frame_equal(synth_panel(SMALL).dataset.frame, synth_panel(SMALL).dataset.frame)

    def test_seed_override(self) -> None:
        panel = synth_panel(SMALL, seed=99)
        assert panel.manifest.config["seed"] == 99
        assert not synth_panel(SMALL).dataset.frame.equals(panel.dataset.frame)

    def test_monitor_coverage_drops_units(self) -> None:
        config = SMALL.model_copy(update={"monitor_coverage": 0.5, "n_units": 200})
        frame = synth_panel(config).dataset.frame
        covered = frame.groupby("unit_id")[monitor_column("o3")].apply(lambda s: s.notna().all())
        assert 0 < covered.sum() < 200
        assert frame[proxy_column("o3")].notna().all()

    def test_wishart_covariance(self) -> None:
        config = SMALL.model_copy(update={"cov_dof": 10})
        within = np.asarray(synth_panel(config).manifest.within_covariance)
        assert within.shape == (2, 2)
        assert np.all(np.linalg.eigvalsh(within) > 0)
        assert within[0, 1] != pytest.approx(0.25**2 * 0.4)

    def test_rejected_covariance_redrawn_with_warning(
        self, monkeypatch: pytest.MonkeyPatch, caplog: pytest.LogCaptureFixture
    ) -> None:
        real = synthetic.sample_wishart
        calls: list[int] = []

        def flaky(scale: np.ndarray, dof: int, rng: np.random.Generator) -> np.ndarray:
            calls.append(dof)
            if len(calls) == 1:
                raise NotPositiveDefinite("Wishart draw")
            return real(scale, dof, rng)

        monkeypatch.setattr(synthetic, "sample_wishart", flaky)
        caplog.set_level(logging.WARNING, logger="biaslab.panel.synthetic")
        panel = synth_panel(SMALL.model_copy(update={"cov_dof": 10}))
        assert len(calls) == 2
        assert np.all(np.linalg.eigvalsh(np.asarray(panel.manifest.within_covariance)) > 0)
        assert "covariance draw 1 rejected" in caplog.text

    def test_covariance_retries_exhausted(self, monkeypatch: pytest.MonkeyPatch) -> None:
        def broken(*_args: object) -> np.ndarray:
            raise NotPositiveDefinite("Wishart draw")

        monkeypatch.setattr(synthetic, "sample_wishart", broken)
        with pytest.raises(GenerationFailed):
            synth_panel(SMALL.model_copy(update={"cov_dof": 10, "max_retries": 2}))

    def test_berkson_proxy_is_latent(self) -> None:
        config = SMALL.model_copy(update={"proxy_error": "berkson"})
        frame = synth_panel(config).dataset.to_who_units().frame
        residual = frame[monitor_column("o3")] - frame[proxy_column("o3")]
        assert residual.std() == pytest.approx(0.2, rel=0.2)


class TestJointCovariances:
    @pytest.mark.parametrize("proxy_error", ["classical", "berkson", "none"])
    def test_structure(self, proxy_error: str) -> None:
        config = SMALL.model_copy(update={"proxy_error": proxy_error})
        manifest = synth_panel(config).manifest
        cov_x, cov_xw, cov_w = manifest.joint_covariances()
        latent = np.asarray(manifest.within_covariance)
        noise = 0.04 * np.eye(2)
        expected = {
            "classical": (latent, latent, latent + noise),
            "berkson": (latent + noise, latent, latent),
            "none": (latent, latent, latent),
        }[proxy_error]
        for got, want in zip((cov_x, cov_xw, cov_w), expected, strict=True):
            np.testing.assert_allclose(got, want)


class TestPopulationBiases:
    def test_classical_signs(self) -> None:
        manifest = synth_panel(SMALL).manifest
        omitted, measured = population_biases(manifest, "o3", "pm25")
        assert omitted < 0
        assert omitted < measured < 0

    def test_no_error_gives_zero_meb(self) -> None:
        manifest = synth_panel(SMALL.model_copy(update={"proxy_error": "none"})).manifest
        _, measured = population_biases(manifest, "o3", "pm25")
        assert measured == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("proxy_error", ["classical", "berkson"])
    def test_matches_large_panel_estimates(self, proxy_error: str) -> None:
        panel = synth_panel(_large(proxy_error))
        result = run_triple(panel.dataset.to_who_units(), Combo.parse("o3:pm25:corn"))
        omitted, measured = population_biases(panel.manifest, "o3", "pm25")
        assert result.ovb_hat == pytest.approx(omitted, abs=0.005)
        assert result.meb_hat == pytest.approx(measured, abs=0.005)
        if proxy_error == "berkson":
            assert measured == pytest.approx(0.0, abs=1e-12)
