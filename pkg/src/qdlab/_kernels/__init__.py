"""Batch kernel backend selection.

The compiled Cython core is preferred when present; otherwise the numpy
fallback is used. Override with the environment variable
``QDLAB_KERNELS`` set to ``compiled``, ``python`` or ``auto`` (default).
"""

from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("QDLAB_KERNELS", "auto")

if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        f"QDLAB_KERNELS must be 'auto', 'compiled' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError(
                "QDLAB_KERNELS=compiled but the qdlab._kernels._core extension is not built"
            )
        _impl = _fallback

BACKEND_NAME: str = _impl.BACKEND_NAME

TRANSFORM_IDENTITY = _fallback.TRANSFORM_IDENTITY
TRANSFORM_EXPONENTIAL = _fallback.TRANSFORM_EXPONENTIAL
TRANSFORM_POWER = _fallback.TRANSFORM_POWER

born_values = _impl.born_values
uniform_support_values = _impl.uniform_support_values
deterministic_values = _impl.deterministic_values
fmean_values = _impl.fmean_values


def available_backends() -> list[str]:
    backends = ["python"]
    try:
        from . import _core  # noqa: F401

        backends.insert(0, "compiled")
    except ImportError:
        pass
    return backends
