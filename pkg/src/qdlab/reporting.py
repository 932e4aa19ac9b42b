"""Shared report-rendering helpers.

All numeric output across reports is rounded to 12 significant digits
before serialization, so identical runs serialize to identical bytes and
reports stay readable.
"""

from __future__ import annotations

import json

import numpy as np


def render_float(x: float) -> float:
    """Round to 12 significant digits (the report rendering precision)."""
    return float(f"{float(x):.12g}")


def json_ready(obj):
    """Recursively convert a payload to JSON-serializable builtins.

    Floats are rounded via :func:`render_float`; numpy scalars and arrays
    become builtins; tuples become lists.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return render_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {key: json_ready(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [json_ready(value) for value in obj.tolist()]
    return obj


def dumps(payload: dict) -> str:
    """Serialize a report payload with stable formatting."""
    return json.dumps(json_ready(payload), indent=2) + "\n"


def complex_pairs(vector) -> list[list[float]]:
    """Render a complex vector as [re, im] pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(vector)]
