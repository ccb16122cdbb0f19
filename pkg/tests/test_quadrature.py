"""Adaptive Simpson against closed forms and scipy."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from growthlab.diffeo import ConvergenceError
from growthlab.quadrature import adaptive_simpson


def test_polynomial_exact():
    got = adaptive_simpson(lambda x: 3 * x**2, 0.0, 2.0, tol=1e-12)
    assert got == pytest.approx(8.0, abs=1e-10)


def test_oscillatory_vs_scipy():
    fn = lambda x: np.sin(7 * x) * np.exp(-x / 3.0)
    ref, _ = quad(lambda x: math.sin(7 * x) * math.exp(-x / 3.0), 0.0, 10.0, limit=200)
    got = adaptive_simpson(fn, 0.0, 10.0, tol=1e-10)
    assert got == pytest.approx(ref, abs=1e-9)


def test_narrow_spike_with_breakpoints():
    fn = lambda x: np.exp(-((x - 5.0) ** 2) * 1e4)
    ref = math.sqrt(math.pi / 1e4)
    got = adaptive_simpson(fn, 0.0, 1000.0, tol=1e-10, breakpoints=[4.9, 5.0, 5.1])
    assert got == pytest.approx(ref, abs=1e-9)


def test_empty_interval():
    assert adaptive_simpson(lambda x: x, 1.0, 1.0) == 0.0


def test_interval_budget_error():
    jumpy = lambda x: np.where(np.sin(1e6 * x) > 0, 1.0, 0.0)
    with pytest.raises(ConvergenceError):
        adaptive_simpson(jumpy, 0.0, 1.0, tol=1e-14, max_intervals=200)
