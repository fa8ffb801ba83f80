# SPDX-License-Identifier: MIT
"""Tests for biaslab.schema and biaslab.jsonio: input documents, configs and deterministic JSON."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from biaslab.bias import BiasSign
from biaslab.errors import DimensionMismatch, SchemaError
from biaslab.jsonio import dumps, format_float, write_json
from biaslab.montecarlo import SimConfig
from biaslab.schema import BlocksDocument, load_config, load_document, validate_config

FIXTURES = Path(__file__).parent / "fixtures"


class TestFormatFloat:
    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (1.0, "1.0"),
            (-0.0, "-0.0"),
            (0.1, "0.10000000000000001"),
            (1e20, "1e+20"),
            (1 / 3, "0.33333333333333331"),
        ],
    )
    def test_seventeen_digits(self, value: float, expected: str) -> None:
        assert format_float(value) == expected
        assert float(format_float(value)) == value

    @pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
    def test_non_finite_is_null(self, value: float) -> None:
        assert format_float(value) == "null"


class TestDumps:
    def test_sorted_keys_and_numpy(self) -> None:
        text = dumps({"b": np.float64(0.5), "a": np.array([1, 2]), "c": BiasSign.ZERO})
        assert list(json.loads(text)) == ["a", "b", "c"]
        assert json.loads(text) == {"a": [1, 2], "b": 0.5, "c": "zero"}

    def test_nan_becomes_null(self) -> None:
        assert json.loads(dumps({"x": [math.nan, 1.0]})) == {"x": [None, 1.0]}

    def test_empty_containers(self) -> None:
        assert dumps({"a": [], "b": {}}) == '{\n  "a": [],\n  "b": {}\n}\n'

    def test_unsupported_type(self) -> None:
        with pytest.raises(TypeError, match="set"):
            dumps({1, 2})

    def test_write_json_is_stable(self, tmp_path: Path) -> None:
        obj = {"z": [0.1, 0.2], "a": {"nested": 1e-300}}
        write_json(tmp_path / "one.json", obj)
        write_json(tmp_path / "two.json", obj)
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()
        raw = (tmp_path / "one.json").read_bytes()
        assert raw.endswith(b"}\n")
        assert b"\r" not in raw


class TestLoadDocument:
    def test_blocks_form(self) -> None:
        doc = load_document(FIXTURES / "case5.json")
        blocks, err = doc.to_blocks()
        assert err is None
        assert (blocks.p, blocks.d) == (1, 2)

    def test_cume_form(self) -> None:
        doc = load_document(FIXTURES / "cume.json")
        blocks, err = doc.to_blocks()
        assert err is not None
        np.testing.assert_allclose(err.a, [0.5, 0.25])
        np.testing.assert_allclose(blocks.G, [[1.5, 0.4], [0.4, 1.25]])
        assert doc.measured_pollutant == 0

    def test_malformed_json(self) -> None:
        with pytest.raises(SchemaError, match="cannot read JSON"):
            load_document(FIXTURES / "malformed.json")

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(SchemaError):
            load_document(tmp_path / "absent.json")

    def test_both_structures_rejected(self, tmp_path: Path) -> None:
        data = json.loads((FIXTURES / "cume.json").read_text())
        data["blocks"] = json.loads((FIXTURES / "case5.json").read_text())["blocks"]
        path = tmp_path / "both.json"
        path.write_text(json.dumps(data))
        with pytest.raises(SchemaError, match="exactly one"):
            load_document(path)

    def test_neither_structure_rejected(self) -> None:
        with pytest.raises(ValueError, match="exactly one"):
            BlocksDocument(beta_Z=[0.0], beta_X=[0.0])

    def test_unknown_field(self, tmp_path: Path) -> None:
        data = json.loads((FIXTURES / "cume.json").read_text())
        data["gamma"] = 1
        path = tmp_path / "extra.json"
        path.write_text(json.dumps(data))
        with pytest.raises(SchemaError, match="gamma"):
            load_document(path)

    def test_shape_errors_surface_on_build(self) -> None:
        doc = BlocksDocument.model_validate(
            {
                "blocks": {"A": [[1.0]], "B": [[0.1]], "C": [[0.1]], "D": [[1.0]], "F": [[1.0]], "G": [[1.0, 0.0]]},
                "beta_Z": [0.0],
                "beta_X": [0.0],
            }
        )
        with pytest.raises(DimensionMismatch):
            doc.to_blocks()


class TestConfigs:
    def test_load_config(self) -> None:
        config = load_config(SimConfig, FIXTURES / "sim_small.json")
        assert (config.n_trials, config.seed, config.chunk_size) == (300, 11, 100)

    def test_validate_config_error(self) -> None:
        with pytest.raises(SchemaError, match="override"):
            validate_config(SimConfig, {"n_trials": -1}, "override")

    def test_load_config_malformed(self) -> None:
        with pytest.raises(SchemaError):
            load_config(SimConfig, FIXTURES / "malformed.json")
