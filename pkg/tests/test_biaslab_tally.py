# SPDX-License-Identifier: MIT
"""Tests for biaslab.tally: binning, merging and the tabular outputs."""

from __future__ import annotations

import io
import math

import pandas as pd
import pytest

from biaslab.jsonio import dumps
from biaslab.montecarlo import TrialOutcome
from biaslab.tally import (
    BIN_LABELS,
    PHENOMENA,
    R2_BINS,
    STRATA,
    SimTally,
    frequency_and_se,
    rho_bin,
)


def _outcome(
    index: int,
    *,
    phen: tuple[bool, bool, bool, bool, bool] = (True, True, False, False, True),
    avg_rho: float = 0.25,
    pc_plus: bool = False,
    weak_partial: bool = False,
    ovb_pollutant: float = -0.1,
) -> TrialOutcome:
    return TrialOutcome(
        trial_index=index,
        phen=phen,
        phen_weak=(True, True, True, False, True),
        avg_rho=avg_rho,
        pairwise_pc_plus=pc_plus,
        weak_partial_pc_plus=weak_partial,
        pairwise_partial_pc_plus=False,
        r_squared=(0.2, 0.5, 0.99),
        ovb_pollutant=ovb_pollutant,
    )


OUTCOMES = [
    _outcome(0),
    _outcome(1, avg_rho=-0.3, pc_plus=True),
    _outcome(2, phen=(False, False, False, False, False), avg_rho=0.0, weak_partial=True),
    _outcome(3, avg_rho=0.45, pc_plus=True, weak_partial=True),
]


def _tally(outcomes: list[TrialOutcome]) -> SimTally:
    tally = SimTally.empty(3)
    for o in outcomes:
        tally.add(o)
    return tally


class TestBins:
    @pytest.mark.parametrize(
        ("rho", "label"),
        [
            (-0.5, "(-inf,-0.1]"),
            (-0.1, "(-inf,-0.1]"),
            (0.0, "(-0.1,0.0]"),
            (0.05, "(0.0,0.1]"),
            (0.5, "(0.4,0.5]"),
            (0.51, "(0.5,inf)"),
        ],
    )
    def test_right_edges_inclusive(self, rho: float, label: str) -> None:
        assert BIN_LABELS[rho_bin(rho)] == label

    def test_frequency_and_se(self) -> None:
        p_hat, se = frequency_and_se(25, 100)
        assert p_hat == 0.25
        assert se == pytest.approx(math.sqrt(0.25 * 0.75 / 100))

    def test_empty_is_nan(self) -> None:
        p_hat, se = frequency_and_se(0, 0)
        assert math.isnan(p_hat)
        assert math.isnan(se)


class TestTally:
    def test_strata_counts(self) -> None:
        tally = _tally(OUTCOMES)
        assert tally.n_trials == 4
        assert list(tally.stratum_sizes) == [4, 2, 2, 0]
        assert tally.frequency("all", 0) == pytest.approx(0.75)
        assert tally.frequency("weak_partial_pc_plus", 0) == pytest.approx(0.5)
        assert tally.frequency("weak_partial_pc_plus", 2, weak=True) == 1.0
        assert math.isnan(tally.frequency("pairwise_partial_pc_plus", 0))
        assert tally.prevalence("pairwise_pc_plus") == 0.5

    def test_bins(self) -> None:
        tally = _tally(OUTCOMES)
        assert int(tally.bin_sizes.sum()) == 4
        freq, _ = tally.bin_frequency(BIN_LABELS.index("(-0.1,0.0]"), 0)
        assert freq == 0.0

    def test_r_squared_summary(self) -> None:
        tally = _tally(OUTCOMES)
        assert tally.r2_histogram.shape == (R2_BINS,)
        assert int(tally.r2_histogram.sum()) == 12
        assert tally.r2_mean == pytest.approx((0.2 + 0.5 + 0.99) / 3)
        assert (tally.r2_min, tally.r2_max) == (0.2, 0.99)

    def test_violation_recorded(self) -> None:
        tally = _tally([_outcome(7, weak_partial=True, ovb_pollutant=0.3)])
        assert tally.measured_ovb_violations == [7]

    def test_merge_matches_single_pass(self) -> None:
        merged = _tally(OUTCOMES[:2]).merge(_tally(OUTCOMES[2:]))
        assert dumps(merged.to_dict()) == dumps(_tally(OUTCOMES).to_dict())

    def test_merge_rejects_mismatch(self) -> None:
        with pytest.raises(ValueError, match="pollutants"):
            SimTally.empty(3).merge(SimTally.empty(5))

    def test_empty_tally_serializes(self) -> None:
        text = dumps(SimTally.empty(5).to_dict())
        assert '"n_trials": 0' in text
        assert "NaN" not in text


class TestOutputs:
    def test_csv_shape(self) -> None:
        frame = pd.read_csv(io.StringIO(_tally(OUTCOMES).to_csv()))
        assert len(frame) == len(PHENOMENA) * (len(STRATA) + len(BIN_LABELS))
        assert set(frame["group"]) == {"stratum", "rho_bin"}

    def test_csv_full_precision(self) -> None:
        tally = SimTally.empty(3)
        for i in range(3):
            tally.add(_outcome(i, phen=(i == 0, False, False, False, False)))
        assert "0.33333333333333331" in tally.to_csv()

    def test_table_text(self) -> None:
        table = _tally(OUTCOMES).format_table()
        for name in PHENOMENA:
            assert name in table
        assert "75.0%" in table
        assert "n/a" not in table.splitlines()[2]
