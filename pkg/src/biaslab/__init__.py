# SPDX-License-Identifier: MIT
"""biaslab: omitted-variable versus measurement-error bias for pollutant regressions."""

from biaslab.assumptions import AssumptionProfile, assumption_profile
from biaslab.bias import (
    BiasReport,
    BiasSign,
    CoefficientVector,
    CovarianceBlocks,
    CUMEError,
    bias_report,
    cume_blocks,
    meb_full,
    meb_Z,
    omega_and_decomposition,
    ovb,
)
from biaslab.errors import (
    BiasLabError,
    GenerationFailed,
    InsufficientData,
    NotPositiveDefinite,
    SchemaError,
)
from biaslab.montecarlo import SimConfig, run_experiment
from biaslab.tally import SimTally

__all__ = [
    "AssumptionProfile",
    "BiasLabError",
    "BiasReport",
    "BiasSign",
    "CUMEError",
    "CoefficientVector",
    "CovarianceBlocks",
    "GenerationFailed",
    "InsufficientData",
    "NotPositiveDefinite",
    "SchemaError",
    "SimConfig",
    "SimTally",
    "assumption_profile",
    "bias_report",
    "cume_blocks",
    "meb_Z",
    "meb_full",
    "omega_and_decomposition",
    "ovb",
    "run_experiment",
]
