# SPDX-License-Identifier: MIT
"""Ground-truth / omitted / error-prone regression triples and their cluster bootstrap.

For a main pollutant, a control pollutant and a crop, three fixed-effects
regressions run on the same rows (those with both monitors, the yield and the
weather present):

* GT: main monitor + control monitor + weather + trend
* OM: main monitor + weather + trend (control omitted)
* ME: main monitor + control proxy + weather + trend

The OVB estimate is ``b_OM - b_GT`` and the MEB estimate ``b_ME - b_GT`` for the
main pollutant's coefficient.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from itertools import permutations
from typing import Any

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator

from biaslab.config import substream_rng
from biaslab.errors import InsufficientData, PreconditionViolated, RankDeficient
from biaslab.panel.dataset import (
    CROP_COLUMN,
    OUTCOME_COLUMN,
    UNIT_COLUMN,
    WEATHER_COLUMNS,
    PanelDataset,
    monitor_column,
    proxy_column,
)
from biaslab.panel.regression import RegressionFit, fit_within
from biaslab.panel.units import Pollutant, parse_pollutant

log = logging.getLogger(__name__)

STATISTICS: tuple[str, ...] = (
    "count_negative_ovb",
    "count_negative_meb",
    "mean_tstat_diff_ovb",
    "mean_tstat_diff_meb",
    "mean_bias_ovb_who",
    "mean_bias_meb_who",
)


@dataclass(frozen=True, order=True)
class Combo:
    """A (main pollutant, control pollutant, crop) triple."""

    main: Pollutant
    control: Pollutant
    crop: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "main", parse_pollutant(self.main))
        object.__setattr__(self, "control", parse_pollutant(self.control))
        if self.main == self.control:
            msg = f"main and control pollutant must differ, both are {self.main.value}"
            raise PreconditionViolated(msg)

    @property
    def label(self) -> str:
        return f"{self.main.value}:{self.control.value}:{self.crop}"

    @classmethod
    def parse(cls, text: str) -> Combo:
        """Parse ``MAIN:CONTROL:CROP``."""
        parts = text.split(":")
        if len(parts) != 3 or not all(parts):
            msg = f"combo must look like MAIN:CONTROL:CROP, got {text!r}"
            raise PreconditionViolated(msg)
        return cls(parse_pollutant(parts[0]), parse_pollutant(parts[1]), parts[2])


def all_combos(
    crops: Iterable[str],
    mains: Sequence[str | Pollutant] | None = None,
    controls: Sequence[str | Pollutant] | None = None,
) -> list[Combo]:
    """Every ordered (main, control) pair with main != control, for every crop."""
    main_keys = [parse_pollutant(p) for p in (mains or list(Pollutant))]
    control_keys = [parse_pollutant(p) for p in (controls or list(Pollutant))]
    pollutants = sorted(set(main_keys) | set(control_keys))
    return [
        Combo(main, control, crop)
        for crop in sorted(crops)
        for main, control in permutations(pollutants, 2)
        if main in main_keys and control in control_keys
    ]


@dataclass(frozen=True)
class ValidationResult:
    combo: Combo
    beta_gt: RegressionFit
    beta_om: RegressionFit
    beta_me: RegressionFit

    @property
    def ovb_hat(self) -> float:
        return self.beta_om.coefficient - self.beta_gt.coefficient

    @property
    def meb_hat(self) -> float:
        return self.beta_me.coefficient - self.beta_gt.coefficient

    def to_dict(self) -> dict[str, Any]:
        return {
            "combo": self.combo.label,
            "beta_gt": asdict(self.beta_gt),
            "beta_om": asdict(self.beta_om),
            "beta_me": asdict(self.beta_me),
            "ovb_hat": self.ovb_hat,
            "meb_hat": self.meb_hat,
        }


def run_triple(data: PanelDataset | pd.DataFrame, combo: Combo) -> ValidationResult:
    """Fit the GT, OM and ME regressions for one combo on a shared row set.

    The row set depends only on the presence of both monitors, the yield and
    the weather; the control's proxy must then cover every selected row.

    Raises:
        InsufficientData: If the proxy has gaps or too few rows remain.
        RankDeficient: If a design is collinear.
    """
    frame = data.frame if isinstance(data, PanelDataset) else data
    main_col = monitor_column(combo.main)
    control_col = monitor_column(combo.control)
    proxy_col = proxy_column(combo.control)
    required = [OUTCOME_COLUMN, main_col, control_col, *WEATHER_COLUMNS]
    rows = frame.loc[frame[CROP_COLUMN] == combo.crop].dropna(subset=required)
    if rows.empty:
        raise InsufficientData("no rows with both monitors, yield and weather", combo.label)
    if rows[proxy_col].isna().any():
        raise InsufficientData(f"proxy {proxy_col} missing on selected rows", combo.label)
    weather = list(WEATHER_COLUMNS)
    try:
        gt = fit_within(rows, [main_col, control_col, *weather])
        om = fit_within(rows, [main_col, *weather])
        me = fit_within(rows, [main_col, proxy_col, *weather])
    except InsufficientData as exc:
        raise InsufficientData(exc.reason, combo.label) from None
    return ValidationResult(
        combo=combo, beta_gt=gt[main_col], beta_om=om[main_col], beta_me=me[main_col]
    )


@dataclass(frozen=True)
class SummaryStats:
    """Aggregates of OVB and MEB estimates over a set of combos."""

    n_combos: int
    count_negative_ovb: int
    count_negative_meb: int
    mean_tstat_diff_ovb: float
    mean_tstat_diff_meb: float
    mean_bias_ovb_who: float
    mean_bias_meb_who: float

    def supports_negative_bias(self, statistic: str) -> bool:
        """Whether ``statistic`` points toward negative bias.

        Counts support it when more than half the combos are negative; means
        support it when they are strictly negative.
        """
        value = getattr(self, statistic)
        if statistic.startswith("count_"):
            return bool(value > self.n_combos / 2)
        return bool(value < 0)


def _mean(values: list[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    return float(np.mean(finite)) if finite else math.nan


def summarize(results: Sequence[ValidationResult]) -> SummaryStats:
    """The count, t-statistic and WHO-unit bias summaries over ``results``."""
    return SummaryStats(
        n_combos=len(results),
        count_negative_ovb=sum(r.ovb_hat < 0 for r in results),
        count_negative_meb=sum(r.meb_hat < 0 for r in results),
        mean_tstat_diff_ovb=_mean([r.beta_om.t_stat - r.beta_gt.t_stat for r in results]),
        mean_tstat_diff_meb=_mean([r.beta_me.t_stat - r.beta_gt.t_stat for r in results]),
        mean_bias_ovb_who=_mean([r.ovb_hat for r in results]),
        mean_bias_meb_who=_mean([r.meb_hat for r in results]),
    )


class BootstrapConfig(BaseModel):
    model_config = {"frozen": True, "extra": "forbid"}

    n_reps: int = Field(default=1_000, ge=0, description="0 gives point estimates only")
    seed: int = Field(default=0, ge=0)
    exclude_controls: tuple[Pollutant, ...] = ()
    identity_resample: bool = Field(
        default=False, description="Reuse the original units in every replicate"
    )

    @field_validator("exclude_controls", mode="before")
    @classmethod
    def _parse_controls(cls, value: Any) -> tuple[Pollutant, ...]:
        return tuple(parse_pollutant(v) for v in value)


@dataclass
class BootstrapSummary:
    """Point-estimate and replicate summaries for all combos and for the control subset."""

    point: dict[str, SummaryStats]
    replicates: dict[str, list[SummaryStats]]
    results: list[ValidationResult]
    skipped: dict[str, str] = field(default_factory=dict)
    replicate_skips: dict[str, int] = field(default_factory=dict)

    def fraction_not_supporting(self, subset: str, statistic: str) -> float:
        reps = self.replicates[subset]
        if not reps:
            return math.nan
        return sum(not s.supports_negative_bias(statistic) for s in reps) / len(reps)

    def to_dict(self) -> dict[str, Any]:
        subsets: dict[str, Any] = {}
        for name, point in self.point.items():
            reps = self.replicates[name]
            subsets[name] = {
                "point": asdict(point),
                "replicates": {stat: [getattr(s, stat) for s in reps] for stat in STATISTICS},
                "fraction_not_supporting": {
                    stat: self.fraction_not_supporting(name, stat) for stat in STATISTICS
                },
            }
        return {
            "results": [r.to_dict() for r in self.results],
            "summaries": subsets,
            "skipped": dict(self.skipped),
            "replicate_skips": dict(self.replicate_skips),
        }


def resample_units(
    frame: pd.DataFrame, rng: np.random.Generator, *, identity: bool = False
) -> pd.DataFrame:
    """Draw units with replacement; draw ``k`` of unit ``u`` becomes pseudo-unit ``u#k``."""
    groups = frame.groupby(UNIT_COLUMN, sort=True).indices
    units = list(groups)
    picks = np.arange(len(units)) if identity else rng.integers(0, len(units), size=len(units))
    positions = np.concatenate([groups[units[i]] for i in picks])
    labels = np.concatenate(
        [np.full(len(groups[units[i]]), f"{units[i]}#{k}", dtype=object) for k, i in enumerate(picks)]
    )
    sample = frame.iloc[positions].copy()
    sample[UNIT_COLUMN] = labels
    return sample.reset_index(drop=True)


def _subsets(
    results: Sequence[ValidationResult], exclude_controls: Sequence[Pollutant]
) -> dict[str, list[ValidationResult]]:
    out = {"all": list(results)}
    if exclude_controls:
        excluded = set(exclude_controls)
        out["excluding_controls"] = [r for r in results if r.combo.control not in excluded]
    return out


def run_combos(
    data: PanelDataset | pd.DataFrame, combos: Sequence[Combo]
) -> tuple[list[ValidationResult], dict[str, str]]:
    """Run every combo; failures are collected by label instead of raised."""
    results: list[ValidationResult] = []
    skipped: dict[str, str] = {}
    for combo in combos:
        try:
            results.append(run_triple(data, combo))
        except (InsufficientData, RankDeficient) as exc:
            skipped[combo.label] = str(exc)
    return results, skipped


def _replicate(
    frame: pd.DataFrame,
    combos: Sequence[Combo],
    config: BootstrapConfig,
    index: int,
) -> tuple[dict[str, SummaryStats], list[str]]:
    rng = substream_rng(config.seed, index)
    sample = resample_units(frame, rng, identity=config.identity_resample)
    results, skipped = run_combos(sample, combos)
    summaries = {name: summarize(rs) for name, rs in _subsets(results, config.exclude_controls).items()}
    log.debug("bootstrap replicate %d: %d combos, %d skipped", index, len(results), len(skipped))
    return summaries, list(skipped)


def cluster_bootstrap(
    data: PanelDataset,
    combos: Sequence[Combo],
    config: BootstrapConfig,
    n_jobs: int = 1,
) -> BootstrapSummary:
    """Point estimates for ``combos`` plus a unit-level (cluster) bootstrap.

    Replicate ``k`` resamples units from its own ``(seed, k)`` stream, so the
    summary is identical for any ``n_jobs``. Combos that fail in a replicate are
    dropped from that replicate and counted in ``replicate_skips``.
    """
    frame = data.frame
    results, skipped = run_combos(frame, combos)
    for label, reason in skipped.items():
        log.warning("combo %s skipped: %s", label, reason)
    point = {name: summarize(rs) for name, rs in _subsets(results, config.exclude_controls).items()}

    if n_jobs == 1:
        outputs = [_replicate(frame, combos, config, k) for k in range(config.n_reps)]
    else:
        outputs = Parallel(n_jobs=n_jobs)(
            delayed(_replicate)(frame, combos, config, k) for k in range(config.n_reps)
        )
    replicates: dict[str, list[SummaryStats]] = {name: [] for name in point}
    replicate_skips: dict[str, int] = {}
    for summaries, skipped_labels in outputs:
        for name, stats in summaries.items():
            replicates[name].append(stats)
        for label in skipped_labels:
            replicate_skips[label] = replicate_skips.get(label, 0) + 1
    return BootstrapSummary(
        point=point,
        replicates=replicates,
        results=results,
        skipped=skipped,
        replicate_skips=dict(sorted(replicate_skips.items())),
    )
