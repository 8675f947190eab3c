"""Backend selection for the damped-trend hot loops.

The compiled extension is used when it was built; otherwise, or when
``SHIFTEVAL_PURE_PYTHON`` is set to a non-empty value, the numpy
fallback is used. Both produce bitwise-identical results.
"""
from __future__ import annotations

import os

if os.environ.get("SHIFTEVAL_PURE_PYTHON"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

holt_filter = _impl.holt_filter
holt_sse = _impl.holt_sse
holt_grid_sse = _impl.holt_grid_sse
simulate_paths = _impl.simulate_paths

__all__ = ["BACKEND", "holt_filter", "holt_sse", "holt_grid_sse", "simulate_paths"]
