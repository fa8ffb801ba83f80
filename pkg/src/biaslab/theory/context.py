# SPDX-License-Identifier: MIT
"""Run context for the theory checks, including the Omega fault-injection hook."""

from __future__ import annotations

import zlib
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from biaslab.bias import CUMEError, omega_and_decomposition
from biaslab.config import DEFAULT_TOLERANCES, Tolerances, substream_rng
from biaslab.linalg import SymMatrix, Vector

OmegaFn = Callable[
    [npt.ArrayLike, npt.ArrayLike, npt.ArrayLike, CUMEError, npt.ArrayLike],
    tuple[SymMatrix, Vector, Vector],
]

# Identity checks compare two exact computations of the same quantity.
IDENTITY_TOLERANCE = 1e-10


def sign_flipped_omega(
    A: npt.ArrayLike,
    B: npt.ArrayLike,
    D: npt.ArrayLike,
    err: CUMEError,
    beta_X: npt.ArrayLike,
) -> tuple[SymMatrix, Vector, Vector]:
    """Deliberately wrong Omega with its sign flipped; the decomposition follows it."""
    omega, _, _ = omega_and_decomposition(A, B, D, err, beta_X)
    flipped = -omega
    weighted = err.a * np.asarray(beta_X, dtype=np.float64)
    attenuation = -np.diag(flipped) * weighted
    additive = -(flipped - np.diag(np.diag(flipped))) @ weighted
    return flipped, attenuation, additive


FAULTS: dict[str, OmegaFn] = {"omega-sign": sign_flipped_omega}


@dataclass
class TheoryContext:
    """Instance budget, seed and tolerances shared by every check."""

    n_instances: int
    seed: int = 0
    tolerances: Tolerances = DEFAULT_TOLERANCES
    omega_fn: OmegaFn = field(default=omega_and_decomposition)

    def rng(self, check_id: str) -> np.random.Generator:
        """Stream keyed by the check id, so checks do not share draws."""
        return substream_rng(self.seed, zlib.crc32(check_id.encode("utf-8")))
