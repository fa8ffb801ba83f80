# SPDX-License-Identifier: MIT
"""Tests for biaslab.assumptions: No Benefit and the PC+ family of checks."""

from __future__ import annotations

import numpy as np
import pytest

from biaslab.assumptions import (
    assumption_profile,
    average_pairwise_correlation,
    check_no_benefit,
    check_pairwise_partial_pc_plus,
    check_pairwise_pc_plus,
    check_weak_partial_pc_plus,
    pollutant_indices,
)
from biaslab.errors import IndexOutOfRange, PreconditionViolated
from biaslab.linalg import cholesky_inverse, equicorrelation

# Z = (temperature, ozone), X = (pm25, no2); ozone is the measured pollutant.
COV = np.array(
    [
        [1.0, 0.1, 0.2, 0.1],
        [0.1, 1.0, 0.4, 0.3],
        [0.2, 0.4, 1.0, 0.5],
        [0.1, 0.3, 0.5, 1.0],
    ]
)


class TestNoBenefit:
    def test_nonpositive(self) -> None:
        assert check_no_benefit([-1.0, 0.0, -0.3])

    def test_positive_entry(self) -> None:
        assert not check_no_benefit([-1.0, 0.1])

    def test_within_tolerance(self) -> None:
        assert check_no_benefit([1e-13])


class TestPairwise:
    def test_positive_pairs(self) -> None:
        assert check_pairwise_pc_plus(COV, [1, 2, 3])

    def test_zero_correlation_is_not_positive(self) -> None:
        cov = np.eye(3)
        assert not check_pairwise_pc_plus(cov, [0, 1, 2])

    def test_single_pollutant_vacuous(self) -> None:
        assert check_pairwise_pc_plus(COV, [2])

    def test_index_out_of_range(self) -> None:
        with pytest.raises(IndexOutOfRange):
            check_pairwise_pc_plus(COV, [1, 4])


class TestWeakPartial:
    def test_holds(self) -> None:
        assert check_weak_partial_pc_plus(COV, p=2, k=1)

    def test_fails_with_negative_partial(self) -> None:
        cov = COV.copy()
        cov[1, 3] = cov[3, 1] = -0.2
        assert not check_weak_partial_pc_plus(cov, p=2, k=1)

    def test_bad_index(self) -> None:
        with pytest.raises(IndexOutOfRange):
            check_weak_partial_pc_plus(COV, p=2, k=2)

    def test_needs_pollutant_block(self) -> None:
        with pytest.raises(PreconditionViolated):
            check_weak_partial_pc_plus(COV, p=4, k=0)


class TestPairwisePartial:
    def test_from_m_matrix_precision(self) -> None:
        precision = np.array(
            [
                [2.0, 0.1, -0.2, -0.1],
                [0.1, 2.0, -0.3, -0.4],
                [-0.2, -0.3, 2.0, -0.5],
                [-0.1, -0.4, -0.5, 2.0],
            ]
        )
        assert check_pairwise_partial_pc_plus(cholesky_inverse(precision), p=1)

    def test_independent_pollutants_fail(self) -> None:
        assert not check_pairwise_partial_pc_plus(np.eye(4), p=1)

    def test_no_pollutants(self) -> None:
        with pytest.raises(PreconditionViolated):
            check_pairwise_partial_pc_plus(np.eye(3), p=3)


class TestProfile:
    def test_indices(self) -> None:
        assert pollutant_indices(2, 3) == [2, 3, 4]
        assert pollutant_indices(2, 3, measured_pollutant=1) == [1, 2, 3, 4]

    def test_average_correlation(self) -> None:
        assert average_pairwise_correlation(equicorrelation(4, 0.3), [0, 1, 2]) == pytest.approx(0.3)
        assert average_pairwise_correlation(COV, [2]) is None

    def test_profile_with_measured_pollutant(self) -> None:
        profile = assumption_profile(COV, 2, [-0.1, -0.2, -0.3], measured_pollutant=1)
        assert profile.no_benefit
        assert profile.pairwise_pc_plus
        assert profile.weak_partial_pc_plus is True
        assert profile.avg_pairwise_pollutant_corr == pytest.approx((0.4 + 0.3 + 0.5) / 3)

    def test_profile_without_measured_pollutant(self) -> None:
        profile = assumption_profile(COV, 2, [-0.2, 0.3])
        assert profile.weak_partial_pc_plus is None
        assert not profile.no_benefit
        assert profile.avg_pairwise_pollutant_corr == pytest.approx(0.5)
