# SPDX-License-Identifier: MIT
"""Fixed-effects panel validation of OVB and MEB signs on crop-yield data."""

from biaslab.panel.dataset import DatasetManifest, PanelDataset, load_panel_csv, write_panel_csv
from biaslab.panel.regression import FEFormula, RegressionFit, fe_ols
from biaslab.panel.synthetic import SynthPanelConfig, SyntheticPanel, population_biases, synth_panel
from biaslab.panel.units import Pollutant, ppb_to_ugm3, who_rescale
from biaslab.panel.validation import (
    BootstrapConfig,
    BootstrapSummary,
    Combo,
    SummaryStats,
    ValidationResult,
    all_combos,
    cluster_bootstrap,
    run_triple,
    summarize,
)

__all__ = [
    "BootstrapConfig",
    "BootstrapSummary",
    "Combo",
    "DatasetManifest",
    "FEFormula",
    "PanelDataset",
    "Pollutant",
    "RegressionFit",
    "SummaryStats",
    "SynthPanelConfig",
    "SyntheticPanel",
    "ValidationResult",
    "all_combos",
    "cluster_bootstrap",
    "fe_ols",
    "load_panel_csv",
    "population_biases",
    "ppb_to_ugm3",
    "run_triple",
    "summarize",
    "synth_panel",
    "who_rescale",
    "write_panel_csv",
]
