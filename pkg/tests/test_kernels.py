"""Backend equivalence: compiled kernels against the NumPy fallback."""

import numpy as np
import pytest

from growthlab import _backend, _kernels_py
from growthlab.growth import GridSpec

fast = pytest.importorskip("growthlab._fast")


@pytest.mark.parametrize(
    "kind,p1,p2",
    [(0, 0.0, 0.0), (1, 2.0, 0.0), (1, 0.5, 0.0), (2, 0.1, 1.0), (2, 0.3, 2.0)],
)
def test_orbit_scan_equivalence(kind, p1, p2):
    grid = GridSpec(uniform=512, ladder_count=40).points()
    af_c, ab_c = fast.orbit_scan(kind, p1, p2, grid, 300)
    af_p, ab_p = _kernels_py.orbit_scan(kind, p1, p2, grid, 300)
    assert np.max(np.abs(af_c - af_p)) < 1e-12
    assert np.max(np.abs(ab_c - ab_p)) < 1e-12


def test_series_sum_equivalence(delta_two):
    ts = np.linspace(-4e4, 4e4, 5001)
    a = fast.hump_series_sum(ts, delta_two.phi, delta_two.scale, delta_two.center)
    b = _kernels_py.hump_series_sum(ts, delta_two.phi, delta_two.scale, delta_two.center)
    assert np.max(np.abs(a - b) / b) < 1e-13


def test_series_sum_bridge_region(delta_one):
    # arguments landing in every piece of the base bump
    ts = delta_one.center[:, None] + np.array([[0.0, 0.5, 2.5, 3.5, 40.0]])
    ts = ts.ravel()
    a = fast.hump_series_sum(ts, delta_one.phi, delta_one.scale, delta_one.center)
    b = _kernels_py.hump_series_sum(ts, delta_one.phi, delta_one.scale, delta_one.center)
    assert np.max(np.abs(a - b) / b) < 1e-13


def test_backend_dispatch_runs():
    grid = np.linspace(0.0, 1.0, 64)
    af, ab = _backend.orbit_scan(1, 2.0, 0.0, grid, 10)
    assert af.shape == (10,)
    assert _backend.BACKEND_NAME in ("compiled", "numpy")
