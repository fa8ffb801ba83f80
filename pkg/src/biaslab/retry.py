# SPDX-License-Identifier: MIT
"""Bounded retry for random structure generation.

Random covariance draws are almost surely positive definite, but floating
point occasionally produces an assembled submatrix that fails the pivot
check. The generator is re-run with fresh draws from the same stream until
it succeeds or the budget is spent.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

from biaslab.errors import GenerationFailed, NotPositiveDefinite

log = logging.getLogger(__name__)

DEFAULT_MAX_RETRIES = 100


def retry_generation[T](
    generate: Callable[[], T],
    *,
    max_retries: int = DEFAULT_MAX_RETRIES,
    on_failure: Callable[[int, Exception], None] | None = None,
) -> T:
    """Call ``generate`` until it returns without raising NotPositiveDefinite.

    Args:
        generate: Zero-argument callable drawing from a caller-owned RNG.
        max_retries: Number of retries after the initial attempt. 0 = no retries.
        on_failure: Optional callback(attempt_number, error) on each failure.

    Returns:
        The first successful result.

    Raises:
        GenerationFailed: After exhausting all attempts.
    """
    errors: list[str] = []
    for attempt in range(1, max_retries + 2):  # +2 because range is exclusive and we start at 1
        try:
            return generate()
        except NotPositiveDefinite as exc:
            errors.append(f"Attempt {attempt}: {exc}")
            if on_failure is not None:
                on_failure(attempt, exc)
            log.debug("generation attempt %d failed: %s", attempt, exc)
    raise GenerationFailed(attempts=max_retries + 1, errors=errors)
