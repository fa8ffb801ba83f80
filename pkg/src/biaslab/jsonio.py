# SPDX-License-Identifier: MIT
"""Deterministic JSON output.

Floats are written with 17 significant digits so every float64 round-trips
exactly; keys are sorted and non-finite floats become ``null``. Reruns with the
same inputs therefore produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel


def format_float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    # keep integral floats recognisably float-typed
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ","
    if isinstance(obj, BaseModel):
        return _encode(obj.model_dump(mode="python"), indent, level)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, np.generic):
        return _encode(obj.item(), indent, level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = sorted((str(_key(k)), v) for k, v in obj.items())
        body = sep.join(
            f"{json.dumps(k, ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in items
        )
        return "{" + pad + body + end + "}"
    if isinstance(obj, list | tuple):
        if not obj:
            return "[]"
        body = sep.join(_encode(v, indent, level + 1) for v in obj)
        return "[" + pad + body + end + "]"
    msg = f"cannot serialize {type(obj).__name__}"
    raise TypeError(msg)


def _key(key: Any) -> Any:
    return key.value if isinstance(key, Enum) else key


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize ``obj`` (dicts, lists, scalars, numpy values, pydantic models)."""
    return _encode(obj, indent, 0) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    """Write ``dumps(obj)`` as UTF-8 with ``\n`` line endings on every platform."""
    Path(path).write_text(dumps(obj), encoding="utf-8", newline="\n")
