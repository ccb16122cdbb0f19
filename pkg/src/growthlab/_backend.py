"""Kernel backend selection.

The compiled extension (growthlab._fast, Cython) is used when it imported
cleanly; otherwise the NumPy fallback takes over.  GROWTHLAB_PURE=1 forces
the fallback, which is handy for benchmarking and debugging.
"""

from __future__ import annotations

import os

from . import _kernels_py

_fast = None
if not os.environ.get("GROWTHLAB_PURE"):
    try:
        from . import _fast  # type: ignore[no-redef]
    except ImportError:
        _fast = None

COMPILED = _fast is not None
BACKEND_NAME = "compiled" if COMPILED else "numpy"


def orbit_scan(kind, p1, p2, grid, n_max):
    if COMPILED:
        return _fast.orbit_scan(kind, p1, p2, grid, n_max)
    return _kernels_py.orbit_scan(kind, p1, p2, grid, n_max)


def hump_series_sum(t, weight, scale, center):
    if COMPILED:
        return _fast.hump_series_sum(t, weight, scale, center)
    return _kernels_py.hump_series_sum(t, weight, scale, center)


generic_orbit_scan = _kernels_py.generic_orbit_scan
