# SPDX-License-Identifier: MIT
"""Exception hierarchy shared by every biaslab module."""

from __future__ import annotations


class BiasLabError(Exception):
    """Base class for all biaslab errors."""


class NotPositiveDefinite(BiasLabError):
    """Raised when a matrix that must be positive definite fails the Cholesky pivot check."""

    def __init__(
        self,
        name: str = "matrix",
        pivot_index: int | None = None,
        pivot: float | None = None,
    ) -> None:
        self.name = name
        self.pivot_index = pivot_index
        self.pivot = pivot
        detail = ""
        if pivot_index is not None and pivot is not None:
            detail = f" (pivot {pivot_index} = {pivot:.3g})"
        super().__init__(f"{name} is not positive definite{detail}")


class DimensionMismatch(BiasLabError, ValueError):
    """Raised when array shapes do not agree with the declared dimensions."""


class IndexOutOfRange(BiasLabError, IndexError):
    """Raised when a variable index falls outside a matrix."""


class PreconditionViolated(BiasLabError, ValueError):
    """Raised when a documented precondition on the inputs does not hold."""


class GenerationFailed(BiasLabError):
    """Raised when random structure generation exhausts its retry budget."""

    def __init__(self, attempts: int, errors: list[str]) -> None:
        self.attempts = attempts
        self.errors = errors
        super().__init__(
            f"Failed to generate a valid structure after {attempts} attempts. "
            f"Errors: {'; '.join(errors[-3:])}"
        )


class RankDeficient(BiasLabError):
    """Raised when a regression design is collinear after the within transformation."""

    def __init__(self, regressors: list[str], rank: int) -> None:
        self.regressors = regressors
        self.rank = rank
        super().__init__(
            f"Design matrix has rank {rank} < {len(regressors)} regressors: {', '.join(regressors)}"
        )


class InsufficientData(BiasLabError):
    """Raised when too few observations remain to identify a regression."""

    def __init__(self, reason: str, combo: str | None = None) -> None:
        self.reason = reason
        self.combo = combo
        prefix = f"[{combo}] " if combo else ""
        super().__init__(f"{prefix}{reason}")


class UnknownPollutant(BiasLabError, ValueError):
    """Raised for pollutant keys outside the known set."""


class SchemaError(BiasLabError, ValueError):
    """Raised when an input document or config fails validation."""


class ConfigError(BiasLabError, ValueError):
    """Raised when an environment or CLI setting is invalid."""
