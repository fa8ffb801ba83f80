# SPDX-License-Identifier: MIT
"""Theory check registry: explicit list of all check classes."""

from __future__ import annotations

from biaslab.theory.base import TheoryCheck
from biaslab.theory.formulas import (
    BerksonZeroCheck,
    ClassicalLimitCheck,
    MebConsistencyCheck,
    ProxyContaminationCheck,
    ProxyShrinkageCheck,
    WeakPartialOvbSignCheck,
)
from biaslab.theory.matrices import (
    MMatrixInverseCheck,
    PartialCorrelationSymmetryCheck,
    SchurComplementCheck,
)
from biaslab.theory.omega import (
    DecompositionIdentityCheck,
    NoErrorPollutantCheck,
    NullPollutantCheck,
    OmegaSignsCheck,
)

CHECK_REGISTRY: list[type[TheoryCheck]] = [
    OmegaSignsCheck,
    DecompositionIdentityCheck,
    NoErrorPollutantCheck,
    NullPollutantCheck,
    WeakPartialOvbSignCheck,
    BerksonZeroCheck,
    MebConsistencyCheck,
    ProxyShrinkageCheck,
    ClassicalLimitCheck,
    ProxyContaminationCheck,
    MMatrixInverseCheck,
    SchurComplementCheck,
    PartialCorrelationSymmetryCheck,
]
