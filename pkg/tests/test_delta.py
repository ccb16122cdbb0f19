"""Schedule, multi-index weights, truncation, the density and its checks."""

import math

import numpy as np
import pytest

from growthlab.basefn import h_value
from growthlab.deltafn import (
    DeltaSchedule,
    MultiIndex,
    build_delta,
    build_schedule,
    delta_from_dict,
    delta_to_dict,
    empty_schedule,
    enumerate_indices,
    flatness_diagnostic,
    g1_exact,
    g_sequence,
    parse_u,
    verify_integrability,
    verify_ratio_bound,
    weights,
)
from growthlab.diffeo import PreconditionError

U_N = parse_u("n")


# ---------------------------------------------------------------------------
# Target sequences and the schedule
# ---------------------------------------------------------------------------

def test_parse_u_variants():
    assert parse_u("n")(7) == 7.0
    assert parse_u("linear:slope=2.5")(4) == 10.0
    assert parse_u("power:alpha=2")(9) == 81.0
    assert parse_u("exp:beta=0.5")(4) == pytest.approx(math.exp(2.0))
    with pytest.raises(PreconditionError):
        parse_u("bogus")


def test_schedule_first_level_values():
    s = build_schedule(U_N, 1)
    # smallest n with n >= e^8
    assert s.tau == (math.ceil(math.e**8),) == (2981,)
    assert s.mu[0] == pytest.approx(2981.0**-0.25, rel=1e-15)
    assert s.log_mu_abs[0] == pytest.approx(2.0, abs=1e-5)


def test_schedule_distinctness_patch():
    # the e^8 floor dominates e^{i^2} for i = 2, so tau_2 = tau_1 + 1
    s = build_schedule(U_N, 3)
    assert s.tau == (2981, 2982, math.ceil(math.e**9))
    assert all(b > a for a, b in zip(s.tau, s.tau[1:]))


def test_schedule_mu_ceiling_and_log_sum():
    s = build_schedule(U_N, 4)
    assert all(m <= math.exp(-2.0) + 1e-15 for m in s.mu)
    # per-level domination: 1/log u(tau_i) <= 1/max(i^2, 8)
    for i, tau in enumerate(s.tau, start=1):
        assert 1.0 / math.log(U_N(tau)) <= 1.0 / max(i * i, 8) + 1e-12


def test_schedule_single_level_trivial():
    s = build_schedule(parse_u("power:alpha=3"), 1)
    assert s.levels == 1
    assert U_N is not None


def test_schedule_rejects_decreasing_target():
    bad = parse_u("n")
    broken = type(bad)(lambda n: -float(n), "broken")
    with pytest.raises(PreconditionError):
        build_schedule(broken, 1)


def test_gamma_factor_branches():
    s = build_schedule(U_N, 1)
    lg = s.log_mu_abs[0]
    # ell = 0 takes the log branch
    assert s.log_gamma_factor(0, 0) == pytest.approx(math.log(lg))
    # small |ell|: the log branch is the minimum (2 < mu^-1 = 7.39)
    assert s.log_gamma_factor(0, 1) == pytest.approx(math.log(2.0), abs=1e-5)
    # both branches exceed 1
    for ell in range(-12, 13):
        alpha, beta = s.alpha_beta(0, ell) if ell else (lg, lg)
        assert s.log_gamma_factor(0, ell) > 0.0


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

def test_weights_zero_index():
    s = build_schedule(U_N, 2)
    k = MultiIndex.make((0, 0), s)
    assert (k.log_phi, k.log_theta, k.center) == (0.0, 0.0, 0)


def test_weights_unit_index():
    s = build_schedule(U_N, 1)
    e1 = MultiIndex.unit(1, s)
    assert e1.phi == pytest.approx(0.13533, abs=1e-5)
    # theta factor = min(|log mu|, 1/mu) = |log mu| ~ 2
    assert e1.theta == pytest.approx(2.0, abs=1e-4)
    assert e1.center == 2981


def test_weights_fourth_power():
    s = build_schedule(U_N, 1)
    k = MultiIndex.make((4,), s)
    # min(2^4, (mu^-1/2)^4 = e^4) = 16
    assert k.theta == pytest.approx(16.0, abs=2e-3)


def test_weights_product_bounded_by_one():
    s = build_schedule(U_N, 3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        entries = tuple(int(v) for v in rng.integers(-9, 10, size=3))
        k = MultiIndex.make(entries, s)
        assert k.log_phi <= 1e-12
        assert k.log_phi + k.log_theta <= 1e-12
        lp, lt = weights(k, s)
        assert (lp, lt) == (k.log_phi, k.log_theta)


def test_shift_sandwich_exact():
    s = build_schedule(U_N, 2)
    rng = np.random.default_rng(1)
    for _ in range(100):
        entries = tuple(int(v) for v in rng.integers(-8, 9, size=2))
        k = MultiIndex.make(entries, s)
        for i in (1, 2):
            shifted = k.shifted(i, s)
            bound = s.log_mu_abs[i - 1] + 1e-12
            assert abs(shifted.log_phi - k.log_phi) <= bound
            assert abs(shifted.log_theta - k.log_theta) <= bound
            # the phi ratio is exactly mu^{+-1}
            assert abs(abs(shifted.log_phi - k.log_phi) - s.log_mu_abs[i - 1]) <= 1e-12


# ---------------------------------------------------------------------------
# Truncation
# ---------------------------------------------------------------------------

def test_enumeration_single_level():
    s = build_schedule(U_N, 1)
    indices, ks, tail = enumerate_indices(s, 1e-10)
    # minimal K with 2 mu^(K+1)/(1-mu) <= 1e-10: tail(11) = 8.73e-11 passes,
    # tail(10) = 6.45e-10 does not
    assert ks == (11,)
    assert len(indices) == 23
    mu = s.mu[0]
    assert tail == pytest.approx(2 * mu**12 / (1 - mu), rel=1e-12)
    assert tail <= 1e-10


def test_enumeration_counts_two_levels():
    s = build_schedule(U_N, 2)
    indices, ks, tail = enumerate_indices(s, 1e-10)
    assert len(indices) == (2 * ks[0] + 1) * (2 * ks[1] + 1) == 625
    assert tail <= 1e-10


def test_enumeration_coarsest():
    s = build_schedule(U_N, 1)
    indices, ks, tail = enumerate_indices(s, 1.0)
    assert ks == (0,)
    assert [k.entries for k in indices] == [(0,)]


def test_enumeration_cap_error():
    s = build_schedule(U_N, 1)
    with pytest.raises(PreconditionError):
        enumerate_indices(s, 1e-80, k_cap=20)


def test_tail_bound_covers_brutal_enumeration():
    # omitted phi-mass measured against a much larger box
    s = build_schedule(U_N, 1)
    indices, ks, tail = enumerate_indices(s, 1e-6)
    K = ks[0]
    mu = s.mu[0]
    extra = sum(2 * mu**j for j in range(K + 1, 200))
    assert extra <= tail * (1 + 1e-12)


# ---------------------------------------------------------------------------
# The density
# ---------------------------------------------------------------------------

def test_degenerate_density_is_base_bump(delta_h):
    ts = np.array([-7.3, -0.4, 0.0, 1.1, 2.5, 9.0])
    assert np.allclose(delta_h.eval(ts), h_value(ts), rtol=1e-14, atol=0)
    assert delta_h.tail_bound == 0.0


def test_density_positive_and_even(delta_one):
    rng = np.random.default_rng(2)
    ts = np.concatenate([rng.uniform(0, 4e4, 100), [0.0, 2981.0, 1.5e4]])
    vals = delta_one.eval(ts)
    assert np.all(vals > 0)
    assert np.max(np.abs(vals - delta_one.eval(-ts))) <= 1e-12 * np.max(vals)


def test_density_humps_dominate(delta_one):
    # at each center the series is at least that hump's weight
    for k in delta_one.indices:
        assert delta_one.eval(float(k.center)) >= k.phi


def test_density_at_first_shift(delta_one):
    assert float(delta_one.eval(2981.0)) >= 0.13533


def test_phi_mass_bounded_by_product(delta_one):
    mu = delta_one.schedule.mu[0]
    assert delta_one.phi_mass() <= (1 + mu) / (1 - mu) + 1e-12


def test_derivative_series_match_finite_differences(delta_one):
    for t in (10.0, 997.3, 2981.0, 12000.0):
        step = 0.5
        fd = (delta_one.eval(t + step) - 2 * delta_one.eval(t) + delta_one.eval(t - step)) / step**2
        d2 = float(delta_one.eval_deriv(t, 2))
        # wide humps: second differences converge fast
        fd_fine = (
            delta_one.eval(t + 0.25) - 2 * delta_one.eval(t) + delta_one.eval(t - 0.25)
        ) / 0.0625
        rich = (4 * fd_fine - fd) / 3.0
        assert d2 == pytest.approx(rich, rel=1e-4, abs=1e-18)
    for t in (10.0, 997.3, 12000.0):
        coarse = (delta_one.eval(t + 0.25) - delta_one.eval(t - 0.25)) / 0.5
        fine = (delta_one.eval(t + 0.125) - delta_one.eval(t - 0.125)) / 0.25
        rich1 = (4 * fine - coarse) / 3.0
        assert float(delta_one.eval_deriv(t, 1)) == pytest.approx(rich1, rel=1e-5)


# ---------------------------------------------------------------------------
# Integrability
# ---------------------------------------------------------------------------

def test_integrability_degenerate(delta_h, flow_h):
    rep = verify_integrability(delta_h)
    # integral of the base bump: bridge part + 1/log 3 per side
    assert rep.total == pytest.approx(delta_h.total_mass(), abs=1e-7)
    assert rep.finite


def test_integrability_window_tail_value(delta_h):
    from growthlab.deltafn import tail_integral

    # for the bare bump the tail beyond 50 is 2/log 50
    assert tail_integral(delta_h, 50.0) == pytest.approx(2 / math.log(50.0), rel=1e-12)


def test_integrability_identity_and_doubling(delta_one):
    from growthlab.deltafn import tail_integral
    from growthlab.quadrature import adaptive_simpson

    rep = verify_integrability(delta_one, quad_tol=1e-7)
    # exact identity: every hump integrates to (int h)/theta
    assert rep.total == pytest.approx(delta_one.total_mass(), abs=1e-6)
    T2 = 2 * rep.window
    breaks = np.unique(
        np.concatenate(
            [delta_one.center, np.geomspace(1.0, T2, 40), -np.geomspace(1.0, T2, 40)]
        )
    )
    doubled = adaptive_simpson(
        delta_one.eval, -T2, T2, tol=1e-7, breakpoints=breaks
    ) + tail_integral(delta_one, T2)
    assert abs(doubled - rep.total) <= 1e-6


# ---------------------------------------------------------------------------
# Shift-ratio bound
# ---------------------------------------------------------------------------

def test_ratio_bound_level_one(delta_one):
    rep = verify_ratio_bound(delta_one, 1)
    assert rep.tau == 2981
    assert rep.target == 2981.0
    assert rep.sup_ratio <= rep.target
    assert rep.lemma_sandwich_ok
    assert rep.ok
    # neighbouring humps differ by a factor mu, so the sup is at least 1/mu
    assert rep.sup_ratio >= 1.0 / delta_one.schedule.mu[0] - 0.01


def test_ratio_bound_two_levels(delta_two):
    for i in (1, 2):
        rep = verify_ratio_bound(delta_two, i)
        assert rep.ok, (i, rep.sup_ratio, rep.target)


def test_ratio_far_tail_below_one(delta_h):
    # beyond the bump the shifted tail is strictly smaller
    ts = np.geomspace(10.0, 1e5, 50)
    ratios = delta_h.eval(ts + 2981.0) / delta_h.eval(ts)
    assert np.all(ratios < 1.0)


def test_ratio_bound_level_out_of_range(delta_one):
    with pytest.raises(PreconditionError):
        verify_ratio_bound(delta_one, 2)


# ---------------------------------------------------------------------------
# Flatness diagnostics and the g recursion
# ---------------------------------------------------------------------------

def test_flatness_ratio_decays_for_bump(delta_h):
    diag = flatness_diagnostic(delta_h, m=1, c=0.0, t_list=(1e2, 1e3, 1e4))
    assert diag.decreasing
    # |h'|/h ~ (1/t)(1 + 2/log t)
    expect = (1.0 / 100.0) * (1.0 + 2.0 / math.log(100.0))
    assert diag.ratios[0] == pytest.approx(expect, rel=0.1)
    assert diag.nu == 1.0
    assert diag.nu_violators_bounded


def test_flatness_nu_zero_index_is_one(delta_one):
    diag = flatness_diagnostic(delta_one, m=1, c=0.0, t_list=(1e3, 1e4))
    assert diag.nu >= 1.0
    assert diag.nu_violators_bounded


def test_flatness_diagnostic_two_levels(delta_two):
    diag = flatness_diagnostic(delta_two, m=1, c=0.5, t_list=(1e3, 1e4, 1e5))
    assert diag.decreasing
    assert diag.nu_violators_bounded


def test_flatness_rejects_bad_args(delta_h):
    with pytest.raises(PreconditionError):
        flatness_diagnostic(delta_h, m=0, c=0.0, t_list=(10.0,))
    with pytest.raises(PreconditionError):
        flatness_diagnostic(delta_h, m=1, c=1.0, t_list=(10.0,))


def test_g0_bump_closed_form(delta_h):
    t = 1e4
    expect = h_value(t + 1.0) / h_value(t)
    assert g_sequence(delta_h, 0, t) == pytest.approx(float(expect), rel=1e-12)
    # (10000 log^2 10000)/(10001 log^2 10001)
    assert float(expect) == pytest.approx(0.99987830, abs=1e-7)


def test_g0_at_origin_positive(delta_one):
    assert g_sequence(delta_one, 0, 0.0) > 0.0


def test_g1_numeric_matches_series_formula(delta_one):
    for t in (1e3, 1e4, 1e5):
        numeric = g_sequence(delta_one, 1, t)
        exact = g1_exact(delta_one, t)
        assert numeric == pytest.approx(exact, rel=2e-3, abs=1e-9)


def test_g_decay_two_levels(delta_two):
    ts = (1e3, 1e4, 1e5)
    g0 = [abs(g_sequence(delta_two, 0, t) - 1.0) for t in ts]
    g1 = [abs(g_sequence(delta_two, 1, t)) for t in ts]
    assert g0[0] > g0[1] > g0[2]
    assert g1[0] > g1[1] > g1[2]


def test_g_order_cap(delta_h):
    with pytest.raises(Exception):
        g_sequence(delta_h, 4, 10.0)


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

def test_delta_roundtrip(tmp_path, delta_one):
    doc = delta_to_dict(delta_one, "n")
    d2, u, spec = delta_from_dict(doc)
    assert spec == "n"
    assert d2.schedule.tau == delta_one.schedule.tau
    assert d2.k_bounds == delta_one.k_bounds
    ts = np.array([0.0, 17.3, 2981.0])
    assert np.allclose(d2.eval(ts), delta_one.eval(ts), rtol=1e-15)


def test_empty_schedule_roundtrip():
    d = build_delta("n", 0)
    doc = delta_to_dict(d, "n")
    d2, _, _ = delta_from_dict(doc)
    assert d2.levels == 0
    assert float(d2.eval(5.0)) == pytest.approx(float(h_value(5.0)), rel=1e-15)
