"""Base bump: values, derivatives, monotonicity, cumulative integral."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from growthlab import basefn


def test_normalisation_and_tail_values():
    assert basefn.h_value(0.0) == 1.0
    # closed form beyond 3
    assert basefn.h_value(5.0) == pytest.approx(1.0 / (5.0 * math.log(5.0) ** 2), rel=1e-15)
    assert basefn.h_value(3.0) == pytest.approx(1.0 / (3.0 * math.log(3.0) ** 2), rel=1e-15)


def test_even():
    ts = np.array([0.3, 1.7, 2.4, 5.0, 77.0])
    assert np.array_equal(basefn.h_value(ts), basefn.h_value(-ts))


def test_strictly_decreasing_on_positive_axis():
    basefn.check_monotone()
    grid = np.unique(np.concatenate([np.linspace(1e-4, 3.0, 5000), np.geomspace(3.0, 1e8, 5000)]))
    vals = basefn.h_value(grid)
    assert np.all(np.diff(vals) < 0.0)


def test_continuity_at_region_boundaries():
    for b in (2.0, 3.0):
        below = basefn.h_value(b - 1e-11)
        above = basefn.h_value(b + 1e-11)
        assert below == pytest.approx(above, rel=1e-8)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivatives_match_finite_differences(order):
    rng = np.random.default_rng(7)
    ts = np.concatenate(
        [
            rng.uniform(0.05, 1.9, 8),
            rng.uniform(2.05, 2.95, 8),
            rng.uniform(3.2, 60.0, 8),
            -rng.uniform(0.5, 8.0, 4),
        ]
    )
    step = 1e-4
    lower = basefn.h_jet(ts - step, order - 1)[order - 1]
    upper = basefn.h_jet(ts + step, order - 1)[order - 1]
    fd = (upper - lower) / (2 * step)
    got = basefn.h_jet(ts, order)[order]
    assert np.max(np.abs(fd - got) / (np.abs(got) + 1e-9)) < 1e-5


def test_odd_derivatives_vanish_at_zero():
    jet = basefn.h_jet(0.0, 4)
    assert jet[1] == 0.0
    assert jet[3] == 0.0


def test_tail_derivative_leading_term():
    # h^(m)(t) ~ (-1)^m m! / (t^(m+1) log^2 t) for large t
    t = 1e7
    for m in range(5):
        lead = (-1) ** m * math.factorial(m) / (t ** (m + 1) * math.log(t) ** 2)
        got = float(basefn.h_jet(t, m)[m])
        assert got == pytest.approx(lead, rel=0.2)


def test_order_cap():
    with pytest.raises(basefn.OrderUnavailableError):
        basefn.h_jet(1.0, 5)


def test_cumulative_against_scipy():
    total = basefn.h_total_integral()
    ref, err = quad(lambda t: float(basefn.h_value(t)), 0, 3, limit=200)
    assert float(basefn.h_bridge_integral(3.0)) == pytest.approx(ref, abs=max(1e-10, 2 * err))
    for x in (-10.0, -3.0, -1.2, 0.0, 0.8, 3.0, 25.0):
        ref, err = quad(lambda t: float(basefn.h_value(t)), -60.0, x, limit=400)
        ref += 1.0 / math.log(60.0)  # exact mass below -60
        assert float(basefn.h_cumulative(x)) == pytest.approx(ref, abs=1e-8)
    assert float(basefn.h_cumulative(0.0)) == pytest.approx(total / 2, rel=1e-12)


def test_tail_integral_closed_form():
    # antiderivative of 1/(t log^2 t) is -1/log t
    assert basefn.h_tail_integral(50.0) == pytest.approx(1.0 / math.log(50.0), rel=1e-15)
    got = float(basefn.h_cumulative(-50.0))
    assert got == pytest.approx(0.25562, abs=1e-4)


def test_ratio_bound_for_rescalings():
    """sup_s h(s)/h(cs) is <= 1 for c <= 1 and O(c log^2 c) for c > 1."""
    ss = np.concatenate([np.linspace(1e-3, 10, 4000), np.geomspace(10, 1e5, 4000)])
    for c in (0.2, 0.7, 1.0):
        ratios = basefn.h_value(ss) / basefn.h_value(c * ss)
        assert np.max(ratios) <= 1.0 + 1e-12
    for c in (2.0, 10.0, 100.0):
        ratios = basefn.h_value(ss) / basefn.h_value(c * ss)
        bound = 3.0 * c * (1.0 + math.log(c) ** 2)  # empirical constant ~1.9
        assert np.max(ratios) <= bound
