# SPDX-License-Identifier: MIT
"""Pollutant keys and concentration unit conversions."""

from __future__ import annotations

from enum import StrEnum

import numpy as np
import numpy.typing as npt

from biaslab.errors import UnknownPollutant


class Pollutant(StrEnum):
    CO = "co"
    NO2 = "no2"
    O3 = "o3"
    PM10 = "pm10"
    PM25 = "pm25"
    SO2 = "so2"


# WHO 2021 daily guideline levels in ug/m^3 (O3 uses the peak-season target).
WHO_DIVISORS: dict[Pollutant, float] = {
    Pollutant.CO: 4000.0,
    Pollutant.NO2: 25.0,
    Pollutant.O3: 100.0,
    Pollutant.PM10: 45.0,
    Pollutant.PM25: 15.0,
    Pollutant.SO2: 40.0,
}

# ug/m^3 per ppb at 20 C and 101.3 kPa. Particulates are always reported by mass.
PPB_TO_UGM3: dict[Pollutant, float] = {
    Pollutant.CO: 1.145,
    Pollutant.NO2: 1.88,
    Pollutant.O3: 1.96,
    Pollutant.SO2: 2.62,
}


def parse_pollutant(key: str | Pollutant) -> Pollutant:
    """Normalize a pollutant key (case-insensitive, ``pm2.5`` accepted for ``pm25``).

    Raises:
        UnknownPollutant: For keys outside the six known pollutants.
    """
    if isinstance(key, Pollutant):
        return key
    normalized = key.strip().lower().replace(".", "").replace("_", "")
    try:
        return Pollutant(normalized)
    except ValueError:
        known = ", ".join(p.value for p in Pollutant)
        msg = f"Unknown pollutant {key!r} (expected one of: {known})"
        raise UnknownPollutant(msg) from None


def who_rescale(values: npt.ArrayLike, pollutant: str | Pollutant) -> npt.NDArray[np.float64]:
    """Express ug/m^3 concentrations as multiples of the pollutant's WHO guideline."""
    divisor = WHO_DIVISORS[parse_pollutant(pollutant)]
    return np.asarray(values, dtype=np.float64) / divisor


def ppb_to_ugm3(values: npt.ArrayLike, pollutant: str | Pollutant) -> npt.NDArray[np.float64]:
    """Convert gas-phase mixing ratios in ppb to ug/m^3.

    Raises:
        UnknownPollutant: For particulates, which have no ppb form.
    """
    key = parse_pollutant(pollutant)
    factor = PPB_TO_UGM3.get(key)
    if factor is None:
        msg = f"{key.value} is measured by mass and has no ppb conversion"
        raise UnknownPollutant(msg)
    return np.asarray(values, dtype=np.float64) * factor
