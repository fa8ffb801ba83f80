# SPDX-License-Identifier: MIT
"""Long-format crop-yield panel with monitor and proxy pollutant columns.

One row per ``(unit_id, year, crop)``. Pollutant and weather values are
repeated across the crops of a unit-year. Empty cells are missing values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from biaslab.errors import SchemaError
from biaslab.panel.units import Pollutant, parse_pollutant, ppb_to_ugm3, who_rescale

log = logging.getLogger(__name__)

UNIT_COLUMN = "unit_id"
TIME_COLUMN = "year"
CROP_COLUMN = "crop"
OUTCOME_COLUMN = "yield"
WEATHER_COLUMNS: tuple[str, ...] = ("w1", "w2", "w3", "w4")


def monitor_column(pollutant: str | Pollutant) -> str:
    return f"mon_{parse_pollutant(pollutant).value}"


def proxy_column(pollutant: str | Pollutant) -> str:
    return f"prox_{parse_pollutant(pollutant).value}"


def panel_columns() -> list[str]:
    """Column order of the panel CSV."""
    return [
        UNIT_COLUMN,
        TIME_COLUMN,
        CROP_COLUMN,
        OUTCOME_COLUMN,
        *(monitor_column(p) for p in Pollutant),
        *(proxy_column(p) for p in Pollutant),
        *WEATHER_COLUMNS,
    ]


class DatasetManifest(BaseModel):
    """Sidecar metadata for a panel CSV.

    ``units`` maps pollutant keys to the unit their monitor and proxy columns
    are stored in; unlisted pollutants are already in ug/m^3.
    """

    model_config = {"extra": "allow"}

    units: dict[str, Literal["ugm3", "ppb"]] = Field(default_factory=dict)


def load_manifest(path: str | Path) -> DatasetManifest:
    try:
        return DatasetManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        msg = f"{path}: cannot read panel manifest: {exc}"
        raise SchemaError(msg) from None
    except ValidationError as exc:
        msg = f"{path}: invalid panel manifest: {exc}"
        raise SchemaError(msg) from None


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """Validated panel frame. Concentrations are in ug/m^3 unless ``who_units`` is set."""

    frame: pd.DataFrame
    who_units: bool = False

    @classmethod
    def from_frame(
        cls, frame: pd.DataFrame, manifest: DatasetManifest | None = None
    ) -> PanelDataset:
        """Validate columns and keys, and convert ppb columns declared in ``manifest``.

        Raises:
            SchemaError: On missing columns, duplicate keys or non-positive yields.
        """
        missing = [c for c in panel_columns() if c not in frame.columns]
        if missing:
            msg = f"panel is missing columns: {', '.join(missing)}"
            raise SchemaError(msg)
        df = frame[panel_columns()].copy()
        df[UNIT_COLUMN] = df[UNIT_COLUMN].astype(str)
        df[CROP_COLUMN] = df[CROP_COLUMN].astype(str)
        try:
            df[TIME_COLUMN] = df[TIME_COLUMN].astype(np.int64)
            numeric = panel_columns()[3:]
            df[numeric] = df[numeric].astype(np.float64)
        except (TypeError, ValueError) as exc:
            msg = f"panel has non-numeric values: {exc}"
            raise SchemaError(msg) from None
        dupes = df.duplicated([UNIT_COLUMN, TIME_COLUMN, CROP_COLUMN])
        if dupes.any():
            first = df.loc[dupes, [UNIT_COLUMN, TIME_COLUMN, CROP_COLUMN]].iloc[0].tolist()
            msg = f"duplicate (unit_id, year, crop) key: {first}"
            raise SchemaError(msg)
        outcome = df[OUTCOME_COLUMN]
        if (outcome.notna() & (outcome <= 0)).any():
            msg = "yield must be positive where present"
            raise SchemaError(msg)
        if manifest is not None:
            for key, unit in manifest.units.items():
                if unit == "ppb":
                    pollutant = parse_pollutant(key)
                    for col in (monitor_column(pollutant), proxy_column(pollutant)):
                        df[col] = ppb_to_ugm3(df[col].to_numpy(), pollutant)
                    log.debug("converted %s from ppb", pollutant.value)
        return cls(frame=df.reset_index(drop=True))

    @property
    def crops(self) -> list[str]:
        return sorted(self.frame[CROP_COLUMN].unique().tolist())

    @property
    def units(self) -> list[str]:
        return sorted(self.frame[UNIT_COLUMN].unique().tolist())

    def monitored_pollutants(self) -> list[Pollutant]:
        """Pollutants with at least one monitor reading, in key order."""
        return [p for p in Pollutant if self.frame[monitor_column(p)].notna().any()]

    def to_who_units(self) -> PanelDataset:
        """Copy with every monitor and proxy column divided by its WHO guideline."""
        if self.who_units:
            return self
        df = self.frame.copy()
        for p in Pollutant:
            for col in (monitor_column(p), proxy_column(p)):
                df[col] = who_rescale(df[col].to_numpy(), p)
        return PanelDataset(frame=df, who_units=True)


def load_panel_csv(path: str | Path, manifest: DatasetManifest | None = None) -> PanelDataset:
    """Read a panel CSV.

    Raises:
        SchemaError: If the file cannot be parsed or fails validation.
    """
    try:
        frame = pd.read_csv(path, dtype={UNIT_COLUMN: str, CROP_COLUMN: str}, encoding="utf-8")
    except (OSError, ValueError, pd.errors.ParserError) as exc:
        msg = f"{path}: cannot read panel CSV: {exc}"
        raise SchemaError(msg) from None
    return PanelDataset.from_frame(frame, manifest)


def write_panel_csv(dataset: PanelDataset, path: str | Path) -> None:
    dataset.frame.to_csv(
        path, index=False, columns=panel_columns(), float_format="%.17g", lineterminator="\n"
    )

