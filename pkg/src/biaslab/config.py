# SPDX-License-Identifier: MIT
"""Numerical tolerances and run settings resolved from CLI flags and environment."""

from __future__ import annotations

import logging
import os
import sys
import zlib
from dataclasses import dataclass

import numpy as np

from biaslab.errors import ConfigError

PD_TOLERANCE = 1e-10
SIGN_TOLERANCE = 1e-12

DEFAULT_SEED = 0
DEFAULT_THREADS = 1


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for positive-definiteness and sign classification.

    ``pd`` is relative to the largest diagonal entry of the matrix being
    factored; ``sign`` is absolute.
    """

    pd: float = PD_TOLERANCE
    sign: float = SIGN_TOLERANCE


DEFAULT_TOLERANCES = Tolerances()


def _int_setting(env_var: str, cli_value: int | None, default: int, *, minimum: int) -> int:
    if cli_value is not None:
        value = cli_value
    else:
        raw = os.environ.get(env_var)
        if raw is None or raw.strip() == "":
            return default
        try:
            value = int(raw.strip())
        except ValueError:
            msg = f"{env_var} must be an integer, got {raw!r}"
            raise ConfigError(msg) from None
    if value < minimum:
        msg = f"{env_var} must be >= {minimum}, got {value}"
        raise ConfigError(msg)
    return value


def load_seed(cli_seed: int | None = None, default: int = DEFAULT_SEED) -> int:
    """Resolve the RNG seed with CLI > env > default priority.

    Args:
        cli_seed: Seed from the ``--seed`` flag (highest priority).
        default: Fallback when neither flag nor env is set, e.g. a config file seed.

    Returns:
        Non-negative integer seed; ``BIASLAB_SEED`` is consulted when no flag is given.

    Raises:
        ConfigError: If the resolved value is not a non-negative integer.
    """
    return _int_setting("BIASLAB_SEED", cli_seed, default, minimum=0)


def substream_rng(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream for item ``index`` (a trial or replicate) of a seeded run.

    Streams are keyed by ``(seed, index)`` alone, so results never depend on
    how work is chunked or how many workers run it.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def named_rng(seed: int, name: str) -> np.random.Generator:
    """Stream for a one-off draw of a seeded run, such as generating a whole panel.

    The spawn key has two words, ``(crc32(name), 0)``, so it is never equal to
    a ``substream_rng`` key and the draw stays independent of every trial or
    replicate stream under the same seed.
    """
    key = (zlib.crc32(name.encode("utf-8")), 0)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def load_threads(cli_threads: int | None = None) -> int:
    """Resolve the worker count with CLI > ``BIASLAB_THREADS`` > 1."""
    return _int_setting("BIASLAB_THREADS", cli_threads, DEFAULT_THREADS, minimum=1)


def load_log_level() -> int:
    """Map ``BIASLAB_LOG_LEVEL`` to a logging level (default WARNING)."""
    name = os.environ.get("BIASLAB_LOG_LEVEL", "WARNING").strip().upper()
    level = logging.getLevelNamesMapping().get(name)
    if level is None:
        msg = f"Unknown BIASLAB_LOG_LEVEL: {name!r}"
        raise ConfigError(msg)
    return level


def configure_logging(level: int | None = None) -> None:
    """Attach a single stderr handler to the ``biaslab`` logger."""
    logger = logging.getLogger("biaslab")
    logger.setLevel(level if level is not None else load_log_level())
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
