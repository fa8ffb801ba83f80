# SPDX-License-Identifier: MIT
"""Mergeable tallies of Monte Carlo phenomenon frequencies.

Counts are kept overall, within each assumption stratum and within eight bins of
the average pairwise pollutant correlation. All counters are integers so merging
is exact and order-independent; the only float accumulator (the R^2 sum) is
merged in chunk order by :func:`biaslab.montecarlo.run_experiment`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt
import pandas as pd

if TYPE_CHECKING:
    from biaslab.montecarlo import TrialOutcome

PHENOMENA: tuple[str, ...] = (
    "ovb_measured_pollutant_negative",
    "meb_measured_pollutant_negative",
    "meb_null_pollutant_negative",
    "meb_nonnull_pollutant_negative",
    "ovb_exceeds_meb",
)

STRATA: tuple[str, ...] = (
    "all",
    "pairwise_pc_plus",
    "weak_partial_pc_plus",
    "pairwise_partial_pc_plus",
)

BIN_EDGES: tuple[float, ...] = (-0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
BIN_LABELS: tuple[str, ...] = (
    "(-inf,-0.1]",
    "(-0.1,0.0]",
    "(0.0,0.1]",
    "(0.1,0.2]",
    "(0.2,0.3]",
    "(0.3,0.4]",
    "(0.4,0.5]",
    "(0.5,inf)",
)

R2_BINS = 20

# z for a two-sided 95% normal interval
_Z95 = 1.96

_CSV_COLUMNS = [
    "group",
    "key",
    "phenomenon",
    "n",
    "count",
    "frequency",
    "std_error",
    "ci95_halfwidth",
    "weak_count",
    "weak_frequency",
]


def rho_bin(avg_rho: float) -> int:
    """Index of the correlation bin holding ``avg_rho``; right edges are inclusive."""
    return int(np.searchsorted(BIN_EDGES, avg_rho, side="left"))


def frequency_and_se(count: int, n: int) -> tuple[float, float]:
    """``p_hat = count / n`` and ``sqrt(p_hat (1 - p_hat) / n)``; NaN when ``n == 0``."""
    if n == 0:
        return math.nan, math.nan
    p_hat = count / n
    return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n)


def _zeros(*shape: int) -> npt.NDArray[np.int64]:
    return np.zeros(shape, dtype=np.int64)


@dataclass
class SimTally:
    """Phenomenon counts for a batch of Monte Carlo trials.

    ``n_trials`` counts completed trials; trials whose structure generation
    failed are counted in ``n_failed`` and appear in no other counter.
    """

    n_pollutants: int
    n_trials: int = 0
    n_failed: int = 0
    stratum_sizes: npt.NDArray[np.int64] = field(default_factory=lambda: _zeros(len(STRATA)))
    strict_counts: npt.NDArray[np.int64] = field(
        default_factory=lambda: _zeros(len(STRATA), len(PHENOMENA))
    )
    weak_counts: npt.NDArray[np.int64] = field(
        default_factory=lambda: _zeros(len(STRATA), len(PHENOMENA))
    )
    bin_sizes: npt.NDArray[np.int64] = field(default_factory=lambda: _zeros(len(BIN_LABELS)))
    bin_counts: npt.NDArray[np.int64] = field(
        default_factory=lambda: _zeros(len(BIN_LABELS), len(PHENOMENA))
    )
    r2_histogram: npt.NDArray[np.int64] = field(default_factory=lambda: _zeros(R2_BINS))
    r2_sum: float = 0.0
    r2_min: float = math.inf
    r2_max: float = -math.inf
    measured_ovb_violations: list[int] = field(default_factory=list)

    @classmethod
    def empty(cls, n_pollutants: int) -> SimTally:
        return cls(n_pollutants=n_pollutants)

    def add(self, outcome: TrialOutcome) -> None:
        """Fold one trial into the tally."""
        strict = np.asarray(outcome.phen, dtype=np.int64)
        weak = np.asarray(outcome.phen_weak, dtype=np.int64)
        membership = (
            True,
            outcome.pairwise_pc_plus,
            outcome.weak_partial_pc_plus,
            outcome.pairwise_partial_pc_plus,
        )
        self.n_trials += 1
        for s, member in enumerate(membership):
            if member:
                self.stratum_sizes[s] += 1
                self.strict_counts[s] += strict
                self.weak_counts[s] += weak
        b = rho_bin(outcome.avg_rho)
        self.bin_sizes[b] += 1
        self.bin_counts[b] += strict
        r2 = np.asarray(outcome.r_squared)
        hist, _ = np.histogram(r2, bins=R2_BINS, range=(0.0, 1.0))
        self.r2_histogram += hist
        self.r2_sum += float(r2.sum())
        self.r2_min = min(self.r2_min, float(r2.min()))
        self.r2_max = max(self.r2_max, float(r2.max()))
        if outcome.measured_ovb_violated:
            self.measured_ovb_violations.append(outcome.trial_index)

    def merge(self, other: SimTally) -> SimTally:
        """Combine two tallies over disjoint trial sets."""
        if other.n_pollutants != self.n_pollutants:
            msg = f"cannot merge tallies over {self.n_pollutants} and {other.n_pollutants} pollutants"
            raise ValueError(msg)
        return SimTally(
            n_pollutants=self.n_pollutants,
            n_trials=self.n_trials + other.n_trials,
            n_failed=self.n_failed + other.n_failed,
            stratum_sizes=self.stratum_sizes + other.stratum_sizes,
            strict_counts=self.strict_counts + other.strict_counts,
            weak_counts=self.weak_counts + other.weak_counts,
            bin_sizes=self.bin_sizes + other.bin_sizes,
            bin_counts=self.bin_counts + other.bin_counts,
            r2_histogram=self.r2_histogram + other.r2_histogram,
            r2_sum=self.r2_sum + other.r2_sum,
            r2_min=min(self.r2_min, other.r2_min),
            r2_max=max(self.r2_max, other.r2_max),
            measured_ovb_violations=sorted(
                self.measured_ovb_violations + other.measured_ovb_violations
            ),
        )

    def frequency(self, stratum: str, phenomenon: int, *, weak: bool = False) -> float:
        """Share of trials in ``stratum`` where ``phenomenon`` (0-based) occurred."""
        s = STRATA.index(stratum)
        counts = self.weak_counts if weak else self.strict_counts
        return frequency_and_se(int(counts[s, phenomenon]), int(self.stratum_sizes[s]))[0]

    def prevalence(self, stratum: str) -> float:
        """Share of completed trials that fall in ``stratum``."""
        return frequency_and_se(int(self.stratum_sizes[STRATA.index(stratum)]), self.n_trials)[0]

    def bin_frequency(self, bin_index: int, phenomenon: int) -> tuple[float, float]:
        """``(frequency, std_error)`` of ``phenomenon`` within one correlation bin."""
        return frequency_and_se(
            int(self.bin_counts[bin_index, phenomenon]), int(self.bin_sizes[bin_index])
        )

    @property
    def r2_mean(self) -> float:
        n = self.n_trials * self.n_pollutants
        return self.r2_sum / n if n else math.nan

    def to_dict(self) -> dict[str, Any]:
        strata: dict[str, Any] = {}
        for s, name in enumerate(STRATA):
            n = int(self.stratum_sizes[s])
            rows = {}
            for k, phen in enumerate(PHENOMENA):
                freq, se = frequency_and_se(int(self.strict_counts[s, k]), n)
                weak_freq, _ = frequency_and_se(int(self.weak_counts[s, k]), n)
                rows[phen] = {
                    "count": int(self.strict_counts[s, k]),
                    "frequency": freq,
                    "std_error": se,
                    "weak_count": int(self.weak_counts[s, k]),
                    "weak_frequency": weak_freq,
                }
            strata[name] = {"n": n, "phenomena": rows}
        bins = []
        for b, label in enumerate(BIN_LABELS):
            n = int(self.bin_sizes[b])
            rows = {}
            for k, phen in enumerate(PHENOMENA):
                freq, se = self.bin_frequency(b, k)
                rows[phen] = {
                    "count": int(self.bin_counts[b, k]),
                    "frequency": freq,
                    "std_error": se,
                    "ci95_halfwidth": _Z95 * se,
                }
            bins.append({"label": label, "n": n, "phenomena": rows})
        return {
            "n_trials": self.n_trials,
            "n_failed": self.n_failed,
            "strata": strata,
            "rho_bins": bins,
            "r_squared": {
                "bin_edges": np.linspace(0.0, 1.0, R2_BINS + 1).tolist(),
                "histogram": self.r2_histogram.tolist(),
                "mean": self.r2_mean,
                "min": self.r2_min if self.n_trials else math.nan,
                "max": self.r2_max if self.n_trials else math.nan,
            },
            "measured_ovb_violations": list(self.measured_ovb_violations),
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per stratum x phenomenon, then one per correlation bin x phenomenon."""
        records: list[dict[str, Any]] = []
        for s, name in enumerate(STRATA):
            n = int(self.stratum_sizes[s])
            for k, phen in enumerate(PHENOMENA):
                freq, se = frequency_and_se(int(self.strict_counts[s, k]), n)
                records.append(
                    {
                        "group": "stratum",
                        "key": name,
                        "phenomenon": phen,
                        "n": n,
                        "count": int(self.strict_counts[s, k]),
                        "frequency": freq,
                        "std_error": se,
                        "ci95_halfwidth": _Z95 * se,
                        "weak_count": int(self.weak_counts[s, k]),
                        "weak_frequency": frequency_and_se(int(self.weak_counts[s, k]), n)[0],
                    }
                )
        for b, label in enumerate(BIN_LABELS):
            for k, phen in enumerate(PHENOMENA):
                freq, se = self.bin_frequency(b, k)
                records.append(
                    {
                        "group": "rho_bin",
                        "key": label,
                        "phenomenon": phen,
                        "n": int(self.bin_sizes[b]),
                        "count": int(self.bin_counts[b, k]),
                        "frequency": freq,
                        "std_error": se,
                        "ci95_halfwidth": _Z95 * se,
                        "weak_count": None,
                        "weak_frequency": None,
                    }
                )
        return pd.DataFrame.from_records(records, columns=_CSV_COLUMNS)

    def to_csv(self) -> str:
        return str(self.to_frame().to_csv(index=False, float_format="%.17g", lineterminator="\n"))

    def format_table(self) -> str:
        """Plain-text table of strict frequencies (percent) by stratum."""
        shown = STRATA[:3]
        header = f"{'phenomenon':<34}" + "".join(f"{name:>26}" for name in shown)
        lines = [header, "-" * len(header)]
        for k, phen in enumerate(PHENOMENA):
            cells = []
            for name in shown:
                freq = self.frequency(name, k)
                cells.append(f"{'n/a' if math.isnan(freq) else f'{100 * freq:.1f}%':>26}")
            lines.append(f"{phen:<34}" + "".join(cells))
        lines.append("-" * len(header))
        sizes = "".join(f"{int(self.stratum_sizes[STRATA.index(n)]):>26d}" for n in shown)
        lines.append(f"{'trials in stratum':<34}" + sizes)
        if self.n_failed:
            lines.append(f"{self.n_failed} trial(s) failed generation and were skipped")
        return "\n".join(lines)
