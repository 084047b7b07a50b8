"""Deterministic JSON serialization with full-precision decimal floats.

Reports and certificates must be byte-identical across runs and must
round-trip float64 values exactly, so floats are always emitted with 17
significant decimal digits instead of Python's shortest-roundtrip repr.
"""

from __future__ import annotations

import math

import numpy as np


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite float in JSON payload: {x!r}")
        out.append(format(x, ".16e"))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if not first:
                out.append(",")
            _emit(key, out)
            out.append(":")
            _emit(obj[key], out)
            first = False
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"unsupported JSON type: {type(obj)!r}")


def dumps(obj) -> str:
    """Serialize to canonical JSON: sorted keys, 17-digit decimal floats."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)
