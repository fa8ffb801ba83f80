# SPDX-License-Identifier: MIT
"""Randomized checks of the bias sign results and the matrix facts behind them."""

from biaslab.theory.base import CheckResult, TheoryCheck
from biaslab.theory.context import FAULTS, TheoryContext
from biaslab.theory.engine import TheoryEngine

__all__ = [
    "FAULTS",
    "CheckResult",
    "TheoryCheck",
    "TheoryContext",
    "TheoryEngine",
]
