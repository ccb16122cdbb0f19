"""Flow map: cumulative coordinates, growth formula, theorem-style checks."""

import math

import numpy as np
import pytest

from growthlab.deltafn import build_delta
from growthlab.diffeo import eval_iterate
from growthlab.flow import build_flow, flow_growth, orbit_growth_crosscheck, verify_theorem_1_8
from growthlab.growth import growth_sequence


def test_normalisation_midpoint(flow_one):
    assert flow_one.a(0.0) == pytest.approx(0.5, abs=1e-9)


def test_cumulative_symmetry(flow_one):
    rng = np.random.default_rng(8)
    etas = rng.uniform(-4e4, 4e4, 100)
    vals = flow_one.a(etas) + flow_one.a(-etas)
    assert np.max(np.abs(vals - 1.0)) < 1e-9


def test_cumulative_two_routes(flow_h):
    # left quadrature versus symmetry of the even density
    from scipy.integrate import quad

    left, _ = quad(lambda t: float(flow_h.delta.eval(t)), -60.0, 3.0, limit=400)
    left += 1.0 / math.log(60.0)
    direct = flow_h.a(3.0) * flow_h.total
    assert direct == pytest.approx(left, abs=1e-7)
    # normalisation uses the quadrature total, so symmetry holds to its error
    assert flow_h.a(3.0) + flow_h.a(-3.0) == pytest.approx(1.0, abs=1e-8)


def test_inverse_roundtrip(flow_one):
    etas = np.linspace(-2500.0, 2500.0, 501)
    err = np.abs(flow_one.a_inv(flow_one.a(etas)) - etas)
    assert np.max(err) < 1e-9


def test_conjugation_to_translation(flow_one):
    f = flow_one.as_diffeo()
    xs = flow_one.a(np.linspace(-3000.0, 3000.0, 1000))
    drift = flow_one.a_inv(f.eval(xs)) - flow_one.a_inv(xs) - 1.0
    assert np.max(np.abs(drift)) < 1e-8


def test_iterates_equal_shifts(flow_one):
    f = flow_one.as_diffeo()
    xs = flow_one.a(np.array([-1500.5, -3.3, 0.4, 7.7, 900.2]))
    for n in (2, 7, -4):
        direct = flow_one.eval_shift(xs, n)
        stepped = eval_iterate(f, n, xs)
        assert np.max(np.abs(direct - stepped)) < 1e-9


def test_monotone_and_fixed_ends(flow_one):
    f = flow_one.as_diffeo()
    xs = np.linspace(0.0, 1.0, 2001)
    ys = f.eval(xs)
    assert np.all(np.diff(ys) >= 0.0)
    assert float(f.eval(0.0)) == 0.0
    assert float(f.eval(1.0)) == 1.0
    assert np.all(f.deriv(xs) > 0.0)


def test_flow_growth_trivial_and_symmetric(flow_one):
    assert flow_growth(flow_one, 0) == 1.0
    assert flow_growth(flow_one, 5) == flow_growth(flow_one, -5)


def test_flow_growth_subsequence_bound(flow_one):
    tau = flow_one.delta.schedule.tau[0]
    gamma_tau = flow_growth(flow_one, tau)
    assert gamma_tau <= flow_one.delta.schedule.u(tau)
    # neighbouring humps differ by a factor mu: the sup is at least 1/mu
    assert gamma_tau >= 1.0 / flow_one.delta.schedule.mu[0] - 0.01


def test_theorem_report(flow_one):
    rep = verify_theorem_1_8(flow_one, flatness_eta=(1e4, 1e6, 1e8, 1e10))
    assert rep.subsequence_ok
    assert all(r <= 1.0 for r in rep.ratios)
    assert rep.flatness_decreasing
    assert abs(rep.g0_minus_1[-1]) < 1e-9
    assert abs(rep.g1[-1]) < 1e-5
    assert abs(rep.g2[-1]) < 1e-1


def test_theorem_report_degenerate(flow_h):
    rep = verify_theorem_1_8(flow_h, flatness_eta=(1e4, 1e6))
    assert rep.taus == ()
    assert rep.ratios == ()
    assert rep.subsequence_ok  # vacuously


def test_flow_vs_orbit_growth(flow_one):
    flow_vals, orbit_vals = orbit_growth_crosscheck(flow_one, 25)
    rel = np.abs(flow_vals / orbit_vals - 1.0)
    assert np.max(rel) < 0.05


def test_endpoint_flatness_via_map_derivatives(flow_one):
    f = flow_one.as_diffeo()
    # approach 1 along x = a(10^j): f' -> 1 and f'' -> 0
    for j, tol1, tol2 in ((4, 1e-3, 2.0), (6, 1e-5, 0.1), (8, 1e-7, 1e-3)):
        x = float(flow_one.a(10.0**j))
        assert abs(float(f.deriv(x)) - 1.0) < tol1
        assert abs(float(f.deriv_k(x, 2))) < tol2


def test_flatness_report_integration(flow_one):
    from growthlab.diffeo import flatness_report

    ladder = 1.0 - np.array([float(flow_one.a(10.0**j)) for j in (4, 5, 6, 7, 8)])
    rep = flatness_report(flow_one.as_diffeo(), max_order=2, ladder=ladder)
    for end in (0.0, 1.0):
        assert rep[end].magnitudes[1] < 1e-4
        assert rep[end].magnitudes[2] < 1e-4
        assert rep[end].first_nonflat_order is None


def test_growth_sequence_generic_path(flow_one):
    # the orbit machinery accepts the flow as a plain interval map
    grid = flow_one.orbit_grid(3)
    records = growth_sequence(flow_one.as_diffeo(), 3, grid)
    assert len(records) == 3
    assert all(r.gamma_n >= 1.0 for r in records)
