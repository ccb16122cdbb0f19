"""Growth sequences, exponential rates, orbit gap bounds."""

import math

import numpy as np
import pytest

from growthlab.diffeo import Identity, Mobius, PolyPerturb, PreconditionError
from growthlab.growth import (
    GridSpec,
    gamma_exponent,
    grid_slack_estimate,
    growth_sequence,
    log_gamma_array,
    orbit_gap_bound,
    orbit_gaps,
    submultiplicativity_violations,
)


def test_gridspec_contains_endpoints_and_ladders():
    pts = GridSpec(uniform=16, ladder_count=10).points()
    assert pts[0] == 0.0 and pts[-1] == 1.0
    assert np.all(np.diff(pts) > 0)
    for j in (1, 5, 10):
        assert 2.0**-j in pts
        assert 1.0 - 2.0**-j in pts


def test_mobius_growth_matches_closed_form():
    records = growth_sequence(Mobius(2.0), 40)
    for r in records:
        assert r.gamma_n == pytest.approx(2.0**r.n, rel=1e-8)
        # both directions saturate the same bound for this family
        assert r.a_fwd == pytest.approx(r.n * math.log(2.0), rel=1e-10)
        assert r.a_bwd == pytest.approx(r.n * math.log(2.0), rel=1e-10)


def test_identity_growth_is_one():
    records = growth_sequence(Identity(), 5)
    assert [r.gamma_n for r in records] == [1.0] * 5


def test_growth_records_shape():
    records = growth_sequence(PolyPerturb(1, 0.1), 12)
    assert [r.n for r in records] == list(range(1, 13))
    assert all(r.gamma_n >= 1.0 for r in records)
    assert all(r.grid_size == records[0].grid_size for r in records)


@pytest.mark.parametrize("f", [Mobius(2.0), PolyPerturb(1, 0.1)])
def test_submultiplicativity(f):
    records = growth_sequence(f, 60)
    slack = 1e-9 + 4.0 * grid_slack_estimate(f, 60)
    assert submultiplicativity_violations(records, slack) == []


def test_backward_scan_matches_direct_inverse_maximum():
    # a_bwd from the forward scan vs maximising log (f^-n)' over the grid
    from growthlab.diffeo import log_orbit_derivative

    f = PolyPerturb(1, 0.5)
    records = growth_sequence(f, 10)
    pts = GridSpec(uniform=512).points()
    for n in (3, 10):
        direct = float(np.max(log_orbit_derivative(f, -n, pts)))
        scanned = records[n - 1].a_bwd
        assert scanned == pytest.approx(direct, abs=5e-3)


def test_gamma_exponent_mobius():
    est = gamma_exponent(Mobius(2.0), 40)
    assert est.value == pytest.approx(2.0, abs=1e-3)
    assert est.fixed_point_value == pytest.approx(2.0, rel=1e-12)
    assert not est.flagged
    assert len(est.probes) == 2 and est.probes[1][0] == 40


def test_gamma_exponent_identity():
    est = gamma_exponent(Identity(), 16)
    assert est.value == 1.0 and est.fixed_point_value == 1.0


def test_gamma_exponent_parabolic():
    est = gamma_exponent(PolyPerturb(1, 0.1), 1024)
    assert est.value == pytest.approx(1.0, abs=1e-2)
    assert est.fixed_point_value == 1.0
    assert not est.flagged


def test_gamma_exponent_flags_short_probe():
    # a short probe on a parabolic map overestimates the rate; the
    # disagreement with the fixed-point value must be flagged, not averaged
    est = gamma_exponent(PolyPerturb(1, 1.0), 8, tolerance=1e-3)
    assert est.flagged
    assert est.fixed_point_value == 1.0
    assert est.value > 1.0 + 1e-3


def test_orbit_gaps_direction_and_mass():
    gaps = orbit_gaps(PolyPerturb(1, 0.1), 0.5, 400)
    assert gaps.direction == 1
    assert np.all(gaps.deltas > 0)
    assert float(np.sum(np.abs(gaps.deltas))) <= 1.0


def test_orbit_gap_bound_mobius():
    report = orbit_gap_bound(Mobius(2.0), 0.5, 1000)
    # delta_0 = f(0.5) - 0.5 = 1/6
    assert abs(report.gaps.deltas[0]) == pytest.approx(1.0 / 6.0, rel=1e-12)
    assert report.violations == []
    # the orbit reaches the fixed point at double precision and the record
    # says where; checks cover everything before that
    assert report.gaps.saturated_at is not None
    assert report.n_checked == report.gaps.saturated_at - 1
    sums = report.reciprocal_partial_sums
    assert np.all(np.diff(sums) >= 0.0)
    assert sums[-1] <= report.reciprocal_bound
    assert report.ok


@pytest.mark.parametrize("p,c", [(1, 0.1), (2, 0.1)])
def test_orbit_gap_bound_parabolic_full_range(p, c):
    report = orbit_gap_bound(PolyPerturb(p, c), 0.5, 1000)
    assert report.n_checked == 1000
    assert report.ok


def test_orbit_gap_bound_rejects_fixed_seed():
    with pytest.raises(PreconditionError):
        orbit_gap_bound(Identity(), 0.5, 10)
    with pytest.raises(PreconditionError):
        orbit_gap_bound(Mobius(2.0), 0.0, 10)


def test_log_gamma_array_roundtrip():
    records = growth_sequence(Mobius(2.0), 6)
    lg = log_gamma_array(records)
    assert lg.shape == (6,)
    assert lg[0] == pytest.approx(math.log(2.0), rel=1e-12)
