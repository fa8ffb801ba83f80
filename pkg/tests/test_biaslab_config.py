# SPDX-License-Identifier: MIT
"""Tests for biaslab.config: seed/thread precedence, log level and RNG substreams."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from biaslab.config import (
    DEFAULT_SEED,
    configure_logging,
    load_log_level,
    load_seed,
    load_threads,
    named_rng,
    substream_rng,
)
from biaslab.errors import ConfigError


class TestSeed:
    def test_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("BIASLAB_SEED", raising=False)
        assert load_seed() == DEFAULT_SEED

    def test_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_SEED", "42")
        assert load_seed() == 42

    def test_cli_beats_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_SEED", "42")
        assert load_seed(7) == 7

    def test_env_beats_file_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_SEED", "42")
        assert load_seed(None, default=3) == 42
        monkeypatch.delenv("BIASLAB_SEED")
        assert load_seed(None, default=3) == 3

    def test_blank_env_ignored(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_SEED", "  ")
        assert load_seed() == DEFAULT_SEED

    def test_invalid_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_SEED", "seven")
        with pytest.raises(ConfigError, match="BIASLAB_SEED"):
            load_seed()

    def test_negative_rejected(self) -> None:
        with pytest.raises(ConfigError):
            load_seed(-1)


class TestThreads:
    def test_default_single(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("BIASLAB_THREADS", raising=False)
        assert load_threads() == 1

    def test_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_THREADS", "4")
        assert load_threads() == 4
        assert load_threads(2) == 2

    def test_zero_rejected(self) -> None:
        with pytest.raises(ConfigError):
            load_threads(0)


class TestLogging:
    def test_level_from_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_LOG_LEVEL", "debug")
        assert load_log_level() == logging.DEBUG

    def test_default_warning(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("BIASLAB_LOG_LEVEL", raising=False)
        assert load_log_level() == logging.WARNING

    def test_unknown_level(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("BIASLAB_LOG_LEVEL", "chatty")
        with pytest.raises(ConfigError):
            load_log_level()

    def test_single_handler(self) -> None:
        configure_logging(logging.INFO)
        configure_logging(logging.INFO)
        logger = logging.getLogger("biaslab")
        assert len(logger.handlers) == 1
        assert logger.level == logging.INFO


class TestSubstreams:
    def test_same_key_same_draws(self) -> None:
        a = substream_rng(5, 3).standard_normal(4)
        b = substream_rng(5, 3).standard_normal(4)
        np.testing.assert_array_equal(a, b)

    def test_distinct_indices_differ(self) -> None:
        a = substream_rng(5, 3).standard_normal(4)
        b = substream_rng(5, 4).standard_normal(4)
        assert not np.array_equal(a, b)

    def test_distinct_seeds_differ(self) -> None:
        a = substream_rng(5, 0).standard_normal(4)
        b = substream_rng(6, 0).standard_normal(4)
        assert not np.array_equal(a, b)

    def test_named_stream_is_reproducible(self) -> None:
        a = named_rng(5, "synth-panel").standard_normal(4)
        b = named_rng(5, "synth-panel").standard_normal(4)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_named_stream_differs_from_indexed_streams(self, index: int) -> None:
        named = named_rng(5, "synth-panel").standard_normal(4)
        assert not np.array_equal(named, substream_rng(5, index).standard_normal(4))
