# SPDX-License-Identifier: MIT
"""Pydantic models for the analyze input document, its report, and run manifests."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from biaslab.assumptions import AssumptionProfile
from biaslab.bias import CoefficientVector, CovarianceBlocks, CUMEError, cume_blocks
from biaslab.errors import SchemaError

Matrix = list[list[float]]


# --- Input ---


class BlocksSpec(BaseModel):
    """All six blocks of ``Cov(Z, X, W)``."""

    model_config = {"extra": "forbid"}

    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix
    F: Matrix
    G: Matrix


class CUMESpec(BaseModel):
    """``Cov(Z, X)`` plus diagonal classical error variances; W = X + E."""

    model_config = {"extra": "forbid"}

    A: Matrix
    B: Matrix
    D: Matrix
    a: list[float] = Field(description="Error variance per pollutant")


class BlocksDocument(BaseModel):
    """Input to ``biaslab analyze``: exactly one of ``blocks`` or ``cume`` plus coefficients."""

    model_config = {"extra": "forbid"}

    blocks: BlocksSpec | None = None
    cume: CUMESpec | None = None
    beta_Z: list[float]
    beta_X: list[float]
    measured_pollutant: int | None = Field(
        default=None, ge=0, description="0-based index within Z of a perfectly measured pollutant"
    )

    @model_validator(mode="after")
    def _one_structure(self) -> BlocksDocument:
        if (self.blocks is None) == (self.cume is None):
            msg = "exactly one of 'blocks' or 'cume' must be given"
            raise ValueError(msg)
        return self

    def coefficients(self) -> CoefficientVector:
        return CoefficientVector(beta_Z=self.beta_Z, beta_X=self.beta_X)

    def to_blocks(self) -> tuple[CovarianceBlocks, CUMEError | None]:
        """Build the covariance blocks; the CUME error is returned when given.

        Raises:
            DimensionMismatch: If block shapes disagree.
            NotPositiveDefinite: If ``Cov(Z, X)`` fails (CUME form).
        """
        if self.cume is not None:
            err = CUMEError(self.cume.a)
            return cume_blocks(self.cume.A, self.cume.B, self.cume.D, err), err
        assert self.blocks is not None
        spec = {k: np.asarray(v, dtype=np.float64) for k, v in self.blocks.model_dump().items()}
        return CovarianceBlocks(**spec), None


def load_document(path: str | Path) -> BlocksDocument:
    """Read and validate an analyze input file.

    Raises:
        SchemaError: On unreadable files, malformed JSON or schema violations.
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
        data = json.loads(raw)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        msg = f"{path}: cannot read JSON: {exc}"
        raise SchemaError(msg) from None
    try:
        return BlocksDocument.model_validate(data)
    except ValidationError as exc:
        msg = f"{path}: {exc}"
        raise SchemaError(msg) from None


# --- Output ---


class BiasReportDocument(BaseModel):
    ovb: list[float]
    meb_full: list[float]
    meb_Z: list[float]
    meb_X: list[float]
    signs: dict[str, list[str]]
    omega: Matrix | None = None
    attenuation_terms: list[float] | None = None
    additive_terms: list[float] | None = None
    assumptions: AssumptionProfile
    sign_tolerance: float
    manifest: str | None = Field(default=None, description="Relative path of the run manifest")


class RunManifest(BaseModel):
    """What produced a set of output files. Wall-clock time lives only here."""

    command: str
    config: dict[str, Any]
    seed: int | None = None
    version: str
    wall_clock_seconds: float
    outputs: list[str]


def validate_config[M: BaseModel](model: type[M], data: Any, source: str) -> M:
    """Validate a config mapping, converting pydantic errors to SchemaError."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        msg = f"{source}: {exc}"
        raise SchemaError(msg) from None


def load_config[M: BaseModel](model: type[M], path: str | Path) -> M:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        msg = f"{path}: cannot read JSON: {exc}"
        raise SchemaError(msg) from None
    return validate_config(model, data, str(path))
