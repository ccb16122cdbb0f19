"""The slow-growth oscillating density Delta.

Given a strictly increasing unbounded target u(n), pick integer shifts
tau_1 < tau_2 < ... and relative magnitudes mu_i = u(tau_i)**(-1/4), then sum
self-similar copies of the base bump h over finitely supported integer
multi-indices k:

    Delta(t) = sum_k phi(k) * h( phi(k) theta(k) * (t - <k, tau>) ),

    phi(k)   = prod mu_i ** |k_i|,
    theta(k) = prod gamma_{i, k_i} ** |k_i|,
    gamma_{i,0} = |log mu_i|,
    gamma_{i,l} = min(|log mu_i|, mu_i ** (-1/sqrt|l|))   (l != 0).

The rescaling factors theta keep the derivatives of Delta under control
while phi makes neighbouring humps differ by a factor mu_i, which pins the
ratio sup_t Delta(t + tau_i)/Delta(t) below u(tau_i).

The full sum runs over all of Z^infinity; this module enumerates a finite
box |k_i| <= K_i chosen from the geometric tails of phi and reports a
rigorous bound on the omitted phi-mass, so every verified property is a
statement about the truncated object plus an explicit truncation error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _backend
from .basefn import MAX_ORDER, check_monotone, h_cumulative, h_jet, h_total_integral
from .basefn import BRIDGE_A, BRIDGE_B, OrderUnavailableError
from .diffeo import ConvergenceError, PreconditionError
from .quadrature import adaptive_simpson

MU_CEILING = math.exp(-2.0)   # guaranteed by the e^8 floor in the tau rule
_TAU_FLOOR_TARGET = math.exp(8.0)
_K_CAP = 64


# ---------------------------------------------------------------------------
# Target sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetSequence:
    """Strictly increasing unbounded sequence n -> u(n), n a positive integer."""

    fn: callable
    description: str

    def __call__(self, n):
        return self.fn(n)

    def check_increasing(self, probes) -> None:
        vals = [self.fn(int(n)) for n in probes]
        for (n0, v0), (n1, v1) in zip(zip(probes, vals), zip(probes[1:], vals[1:])):
            if not v1 > v0:
                raise PreconditionError(
                    f"target sequence {self.description} not increasing: "
                    f"u({n0}) = {v0}, u({n1}) = {v1}"
                )


def parse_u(spec: str) -> TargetSequence:
    """Mini-language: 'n', 'linear:slope=S', 'power:alpha=A[,scale=C]', 'exp:beta=B'."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            params[key.strip()] = float(val)
    if name == "n":
        return TargetSequence(lambda n: float(n), "n")
    if name == "linear":
        s = params.get("slope", 1.0)
        if s <= 0:
            raise PreconditionError("linear target needs slope > 0")
        return TargetSequence(lambda n: s * n, spec)
    if name == "power":
        alpha = params.get("alpha", 1.0)
        scale = params.get("scale", 1.0)
        if alpha <= 0 or scale <= 0:
            raise PreconditionError("power target needs alpha > 0 and scale > 0")
        return TargetSequence(lambda n: scale * float(n) ** alpha, spec)
    if name == "exp":
        beta = params.get("beta", 1.0)
        if beta <= 0:
            raise PreconditionError("exp target needs beta > 0")
        return TargetSequence(lambda n: math.exp(beta * n), spec)
    raise PreconditionError(f"unknown target sequence spec '{spec}'")


# ---------------------------------------------------------------------------
# Schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaSchedule:
    """Shift/magnitude schedule (tau_i, mu_i) plus the per-level factor rule."""

    u: TargetSequence
    tau: tuple[int, ...]
    mu: tuple[float, ...]

    @property
    def levels(self) -> int:
        return len(self.tau)

    @property
    def log_mu_abs(self) -> tuple[float, ...]:
        return tuple(-math.log(m) for m in self.mu)

    def __post_init__(self):
        if list(self.tau) != sorted(set(self.tau)):
            raise PreconditionError(f"tau must be strictly increasing, got {self.tau}")
        for m in self.mu:
            if not 0.0 < m <= MU_CEILING + 1e-15:
                raise PreconditionError(
                    f"mu = {m} outside (0, e^-2]; schedule floor violated"
                )

    def alpha_beta(self, i: int, ell: int) -> tuple[float, float]:
        """The two branches of the per-level factor: alpha = |log mu|^|l|,
        beta = mu^(-sqrt|l|)."""
        lg = self.log_mu_abs[i]
        al = abs(ell)
        return lg**al, math.exp(lg * math.sqrt(al))

    def log_gamma_factor(self, i: int, ell: int) -> float:
        """log gamma_{i, ell}; gamma_{i,0} = |log mu_i|."""
        lg = self.log_mu_abs[i]
        if ell == 0:
            return math.log(lg)
        return min(math.log(lg), lg / math.sqrt(abs(ell)))

    def check_target_sum(self) -> None:
        """Selection-rule guarantee: 1/log u(tau_i) <= min(1/8, 1/i^2) per level."""
        for i, t in enumerate(self.tau, start=1):
            lu = math.log(self.u(t))
            if lu < max(i * i, 8) - 1e-9:
                raise PreconditionError(
                    f"level {i}: log u(tau_{i}) = {lu:.4f} below the selection floor"
                )


def _search_min_n(u: TargetSequence, target: float, lo: int = 1) -> int:
    """min n >= lo with u(n) >= target, by exponential search + bisection."""
    n = max(lo, 1)
    if u(n) >= target:
        return n
    hi = n
    while u(hi) < target:
        hi *= 2
        if hi > 10**18:
            raise ConvergenceError(f"target {target} not reached by u below 1e18")
    lo_b = hi // 2
    while lo_b + 1 < hi:
        mid = (lo_b + hi) // 2
        if u(mid) >= target:
            hi = mid
        else:
            lo_b = mid
    return hi


def build_schedule(u: TargetSequence, levels: int, tau_floor: int = 1) -> DeltaSchedule:
    """tau_i = min{n : u(n) >= max(e^{i^2}, e^8, u(tau_floor))}, made distinct.

    The e^8 floor forces mu_i <= e^-2 (so every gamma factor exceeds 1) and
    the e^{i^2} terms dominate the reciprocal-log sum by sum 1/i^2.
    """
    if levels < 1:
        raise PreconditionError(f"levels must be >= 1, got {levels}")
    u.check_increasing([1, 2, 4, 8, 16])
    check_monotone()
    floor_val = u(max(1, tau_floor))
    taus: list[int] = []
    for i in range(1, levels + 1):
        target = max(math.exp(i * i), _TAU_FLOOR_TARGET, floor_val)
        t = _search_min_n(u, target)
        if taus and t <= taus[-1]:
            t = taus[-1] + 1
        taus.append(t)
    mus = tuple(float(u(t)) ** -0.25 for t in taus)
    sched = DeltaSchedule(u, tuple(taus), mus)
    sched.check_target_sum()
    return sched


def empty_schedule() -> DeltaSchedule:
    """Degenerate zero-level schedule; the resulting density is h itself."""
    return DeltaSchedule(TargetSequence(lambda n: float(n), "n"), (), ())


# ---------------------------------------------------------------------------
# Multi-indices and weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported integer index; entries[i] = k_{i+1} for level i."""

    entries: tuple[int, ...]
    log_phi: float = field(compare=False, default=0.0)
    log_theta: float = field(compare=False, default=0.0)
    center: int = field(compare=False, default=0)

    @staticmethod
    def make(entries, schedule: DeltaSchedule) -> "MultiIndex":
        entries = tuple(int(e) for e in entries)
        if len(entries) > schedule.levels:
            raise PreconditionError(
                f"index supported on {len(entries)} levels, schedule has {schedule.levels}"
            )
        lp, lt = weights_log(entries, schedule)
        center = sum(k * t for k, t in zip(entries, schedule.tau))
        return MultiIndex(entries, lp, lt, center)

    @staticmethod
    def unit(i: int, schedule: DeltaSchedule) -> "MultiIndex":
        """The unit index e^i (1-based level i)."""
        e = [0] * schedule.levels
        e[i - 1] = 1
        return MultiIndex.make(e, schedule)

    def shifted(self, i: int, schedule: DeltaSchedule, step: int = 1) -> "MultiIndex":
        e = list(self.entries) + [0] * (schedule.levels - len(self.entries))
        e[i - 1] += step
        return MultiIndex.make(e, schedule)

    @property
    def phi(self) -> float:
        return math.exp(self.log_phi)

    @property
    def theta(self) -> float:
        return math.exp(self.log_theta)


def weights_log(entries, schedule: DeltaSchedule) -> tuple[float, float]:
    """(log phi, log theta) in exact log-space arithmetic.

    phi * theta <= 1 is asserted (it holds per level: the beta branch gives
    mu^(|l| - sqrt|l|) <= 1 for every l).
    """
    log_phi = 0.0
    log_theta = 0.0
    for i, k in enumerate(entries):
        if k == 0:
            continue
        ak = abs(k)
        log_phi += ak * math.log(schedule.mu[i])
        log_theta += ak * schedule.log_gamma_factor(i, k)
    if log_phi > 1e-12 or log_phi + log_theta > 1e-12:
        raise AssertionError(
            f"weight bound violated: log phi = {log_phi}, log phi theta = {log_phi + log_theta}"
        )
    return log_phi, log_theta


def weights(k: MultiIndex, schedule: DeltaSchedule) -> tuple[float, float]:
    return weights_log(k.entries, schedule)


def enumerate_indices(
    schedule: DeltaSchedule, tail_eps: float, k_cap: int = _K_CAP
) -> tuple[list[MultiIndex], tuple[int, ...], float]:
    """Box truncation |k_i| <= K_i with a rigorous omitted phi-mass bound.

    Per level, K_i is minimal with
        2 mu_i^(K_i+1)/(1-mu_i) * prod_{j != i} (1+mu_j)/(1-mu_j) <= tail_eps/levels,
    and the reported tail bound is the sum of those per-level geometric tails
    (each one covers every index whose level-i entry escapes the box).
    """
    if tail_eps <= 0:
        raise PreconditionError(f"tail_eps must be positive, got {tail_eps}")
    if schedule.levels == 0:
        return [MultiIndex.make((), schedule)], (), 0.0
    mus = schedule.mu
    full = [(1 + m) / (1 - m) for m in mus]
    ks = []
    tail_total = 0.0
    for i, m in enumerate(mus):
        other = 1.0
        for j, fj in enumerate(full):
            if j != i:
                other *= fj
        K = 0
        while True:
            tail = 2.0 * m ** (K + 1) / (1.0 - m) * other
            if tail <= tail_eps / schedule.levels:
                break
            K += 1
            if K > k_cap:
                achievable = 2.0 * m ** (k_cap + 1) / (1.0 - m) * other * schedule.levels
                raise PreconditionError(
                    f"tail_eps = {tail_eps} needs K_{i + 1} > {k_cap}; "
                    f"achievable bound at the cap is {achievable:.3e}"
                )
        ks.append(K)
        tail_total += 2.0 * m ** (K + 1) / (1.0 - m) * other
    ranges = [range(-K, K + 1) for K in ks]
    indices = [MultiIndex.make(e, schedule) for e in product(*ranges)]
    return indices, tuple(ks), tail_total


# ---------------------------------------------------------------------------
# The density itself
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaFunction:
    schedule: DeltaSchedule
    indices: list[MultiIndex]
    k_bounds: tuple[int, ...]
    tail_bound: float            # rigorous bound on the omitted phi-mass
    tail_eps: float
    # flat arrays for the kernels
    phi: np.ndarray = field(repr=False, default=None)
    theta: np.ndarray = field(repr=False, default=None)
    scale: np.ndarray = field(repr=False, default=None)   # phi * theta
    center: np.ndarray = field(repr=False, default=None)

    @staticmethod
    def build(schedule: DeltaSchedule, tail_eps: float = 1e-10) -> "DeltaFunction":
        check_monotone()
        indices, ks, tail = enumerate_indices(schedule, tail_eps)
        order = np.argsort([-ix.log_phi for ix in indices])
        indices = [indices[i] for i in order]
        phi = np.array([ix.phi for ix in indices])
        theta = np.array([ix.theta for ix in indices])
        center = np.array([float(ix.center) for ix in indices])
        return DeltaFunction(
            schedule, indices, ks, tail, tail_eps, phi, theta, phi * theta, center
        )

    @property
    def levels(self) -> int:
        return self.schedule.levels

    @property
    def max_center(self) -> float:
        return float(np.max(np.abs(self.center))) if self.center.size else 0.0

    def phi_mass(self) -> float:
        """Enumerated sum of phi(k); bounded by prod (1+mu)/(1-mu)."""
        return float(np.sum(self.phi))

    def theta_reciprocal_mass(self) -> float:
        return float(np.sum(1.0 / self.theta))

    # -- evaluation --------------------------------------------------------

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Delta(t); positive everywhere, even in t."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = _backend.hump_series_sum(np.atleast_1d(t), self.phi, self.scale, self.center)
        return float(out[0]) if scalar else out

    def eval_deriv(self, t, m: int):
        """Delta^(m)(t) = sum phi^(m+1) theta^m h^(m)(phi theta (t - c_k)).

        Signed terms for m >= 1 are combined with exact (fsum) accumulation.
        """
        if m == 0:
            return self.eval(t)
        if m > MAX_ORDER:
            raise OrderUnavailableError(
                f"density derivatives capped at order {MAX_ORDER}, requested {m}"
            )
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t).astype(float)
        coef = self.phi ** (m + 1) * self.theta**m
        args = self.scale[:, None] * (tt[None, :] - self.center[:, None])
        hm = h_jet(args.ravel(), m)[m].reshape(args.shape)
        terms = coef[:, None] * hm
        out = np.array([math.fsum(col) for col in terms.T])
        return float(out[0]) if scalar else out

    def cumulative(self, t):
        """Integral of the truncated series over (-inf, t], term by term.

        Each hump integrates in closed form through the cumulative of h, so
        this is exact up to the cached bridge table -- no global quadrature.
        Used by the flow construction and as the analytic side of the
        integrability cross-check.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t).astype(float)
        out = np.zeros_like(tt)
        for w, s, th, c in zip(self.phi, self.scale, self.theta, self.center):
            out += h_cumulative(s * (tt - c)) / th
        return float(out[0]) if scalar else out

    def total_mass(self) -> float:
        """Exact integral of the truncated series: (integral of h) * sum 1/theta."""
        return h_total_integral() * self.theta_reciprocal_mass()

    # -- characteristic grids ----------------------------------------------

    def hump_grid(self, shift: float = 0.0, per_anchor: int = 17, span: float = 4.0) -> np.ndarray:
        """Points refined near every hump center (and centers - shift), plus
        midpoints between consecutive anchors; used for ratio suprema."""
        anchors = set(float(c) for c in self.center)
        anchors.update(float(c) - shift for c in self.center)
        anchors = np.array(sorted(anchors))
        mids = 0.5 * (anchors[1:] + anchors[:-1]) if anchors.size > 1 else np.array([])
        offs = np.concatenate([
            [0.0],
            np.geomspace(1e-3, max(span, 1.0), per_anchor),
            -np.geomspace(1e-3, max(span, 1.0), per_anchor),
        ])
        # widen the offsets per anchor up to the widest hump scale
        width = 1.0 / np.min(self.scale) if self.scale.size else 1.0
        ladders = []
        for mult in (1.0, width ** 0.5, width):
            ladders.append((anchors[:, None] + mult * offs[None, :]).ravel())
        pts = np.concatenate(ladders + [mids, anchors])
        return np.unique(pts)


def build_delta(
    u: TargetSequence | str, levels: int, tail_eps: float = 1e-10, tau_floor: int = 1
) -> DeltaFunction:
    if isinstance(u, str):
        u = parse_u(u)
    if levels == 0:
        return DeltaFunction.build(empty_schedule(), tail_eps)
    return DeltaFunction.build(build_schedule(u, levels, tau_floor), tail_eps)


# ---------------------------------------------------------------------------
# Verifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrabilityReport:
    window: float                # quadrature ran over [-T, T]
    window_integral: float
    tail_estimate: float         # exact tail of the truncated series beyond T
    total: float
    quad_tol: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.total)


def integration_window(d: DeltaFunction, margin: float = 1e4) -> float:
    """Window covering every hump center plus a margin.

    The complementary mass is exact for any window (per-term cumulative of
    h), so the window only needs to contain the structured part.
    """
    if d.center.size == 0:
        return margin
    return float(np.max(np.abs(d.center))) + margin


def tail_integral(d: DeltaFunction, T: float) -> float:
    """Exact integral of the truncated series outside [-T, T].

    Per term: theta^-1 * [H(s(-T - c)) + (int h) - H(s(T - c))] with H the
    cumulative of h; valid for any window, wide humps included.
    """
    int_h = h_total_integral()
    total = 0.0
    for s, th, c in zip(d.scale, d.theta, d.center):
        right = int_h - float(h_cumulative(s * (T - c)))
        left = float(h_cumulative(s * (-T - c)))
        total += (right + left) / th
    return total


def verify_integrability(d: DeltaFunction, quad_tol: float = 1e-7) -> IntegrabilityReport:
    T = integration_window(d)
    breaks = np.unique(
        np.concatenate([
            d.center,
            np.clip(d.center + 3.0 / d.scale, -T, T),
            np.clip(d.center - 3.0 / d.scale, -T, T),
            np.geomspace(1.0, T, 40),
            -np.geomspace(1.0, T, 40),
        ])
    )
    window_integral = adaptive_simpson(d.eval, -T, T, tol=quad_tol, breakpoints=breaks)
    tail = tail_integral(d, T)
    return IntegrabilityReport(T, window_integral, tail, window_integral + tail, quad_tol)


@dataclass(frozen=True)
class RatioReport:
    level: int
    tau: int
    target: float                # u(tau_i)
    sup_ratio: float
    witness_t: float
    lemma_sandwich_ok: bool      # phi/theta shift ratios inside [mu, 1/mu]

    @property
    def ok(self) -> bool:
        return self.sup_ratio <= self.target and self.lemma_sandwich_ok


def shift_sandwich_ok(d: DeltaFunction, i: int, slack: float = 1e-12) -> bool:
    """mu_i <= phi(k + e^i)/phi(k) <= 1/mu_i, same for theta, on every
    enumerated k (checked in log space)."""
    s = d.schedule
    bound = s.log_mu_abs[i - 1] + slack
    for k in d.indices:
        shifted = k.shifted(i, s)
        if abs(shifted.log_phi - k.log_phi) > bound:
            return False
        if abs(shifted.log_theta - k.log_theta) > bound:
            return False
    return True


def verify_ratio_bound(d: DeltaFunction, i: int) -> RatioReport:
    """Grid supremum of Delta(t + tau_i)/Delta(t) against u(tau_i)."""
    if not 1 <= i <= d.levels:
        raise PreconditionError(f"level {i} outside 1..{d.levels}")
    tau = d.schedule.tau[i - 1]
    target = float(d.schedule.u(tau))
    grid = d.hump_grid(shift=float(tau))
    ratios = d.eval(grid + float(tau)) / d.eval(grid)
    j = int(np.argmax(ratios))
    return RatioReport(
        i, tau, target, float(ratios[j]), float(grid[j]), shift_sandwich_ok(d, i)
    )


@dataclass(frozen=True)
class FlatnessDiagnostic:
    m: int
    c: float
    t_values: tuple[float, ...]
    ratios: tuple[float, ...]    # max_{[t, t+1]} |Delta^(m)| / Delta^(m+c)(t)
    decreasing: bool
    nu: float                    # max over enumerated k of phi^(1-c) theta^m
    nu_violators_bounded: bool   # every factor > 1 sits at |k_i| <= (m/(1-c))^2

    @property
    def ok(self) -> bool:
        return self.decreasing and self.nu_violators_bounded


def flatness_diagnostic(
    d: DeltaFunction, m: int, c: float, t_list, subsamples: int = 33
) -> FlatnessDiagnostic:
    """Decay of max |Delta^(m)| over [t, t+1] relative to Delta^(m+c)(t)."""
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}")
    if not 0.0 <= c < 1.0:
        raise PreconditionError(f"c must lie in [0, 1), got {c}")
    ratios = []
    for t in t_list:
        ss = np.linspace(t, t + 1.0, subsamples)
        num = float(np.max(np.abs(d.eval_deriv(ss, m))))
        den = float(d.eval(t)) ** (m + c)
        ratios.append(num / den)
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))

    nu = 1.0
    bound = (m / (1.0 - c)) ** 2
    violators_ok = True
    for k in d.indices:
        val = math.exp((1.0 - c) * k.log_phi + m * k.log_theta)
        nu = max(nu, val)
        if val > 1.0 and any(e != 0 for e in k.entries):
            # the proof localises the excess: some level factor is >= 1 and
            # its entry obeys |k_i| <= (m/(1-c))^2
            sched = d.schedule
            culprit_ok = False
            for i, e in enumerate(k.entries):
                if e == 0:
                    continue
                factor = (1.0 - c) * math.log(sched.mu[i]) + m * sched.log_gamma_factor(i, e)
                if factor >= 0.0 and abs(e) <= bound:
                    culprit_ok = True
                    break
            violators_ok = violators_ok and culprit_ok
    return FlatnessDiagnostic(
        m, c, tuple(float(t) for t in t_list), tuple(ratios), decreasing, nu, violators_ok
    )


# ---------------------------------------------------------------------------
# The recursive regularity functions g_m
# ---------------------------------------------------------------------------

def _diff_step(t: float) -> float:
    """Central-difference step tuned to the density's local variation scale.

    Between humps the density is a power-log tail varying on scale |t|, so a
    relative step is both safe and accurate; near the origin an absolute
    floor keeps the step meaningful.
    """
    return max(0.05, 0.01 * abs(t))


def g_sequence(d: DeltaFunction, m: int, t: float, norm: float = 1.0) -> float:
    """g_0 = Delta(t+1)/Delta(t); g_{m+1} = g_m' / Delta, numerically.

    The derivative uses a fourth-order central stencil with the step tuned
    to the density's local variation scale; norm rescales the density (the
    flow normalises Delta to unit mass, which multiplies g_m by norm**m).
    """
    if m < 0:
        raise PreconditionError("m must be >= 0")
    if m > MAX_ORDER - 1:
        raise OrderUnavailableError(
            f"g_m capped at m = {MAX_ORDER - 1} (density derivative order)"
        )
    if m == 0:
        return float(d.eval(t + 1.0) / d.eval(t))
    s = _diff_step(t)
    g = lambda tt: g_sequence(d, m - 1, tt, norm)
    deriv = (8.0 * (g(t + s) - g(t - s)) - (g(t + 2 * s) - g(t - 2 * s))) / (12.0 * s)
    return deriv / (float(d.eval(t)) / norm)


def g1_exact(d: DeltaFunction, t: float, norm: float = 1.0) -> float:
    """Closed-form g_1 from the derivative series:
    (omega Delta' * Delta - omega Delta * Delta') / Delta^3, omega v = v(t+1) - v(t)."""
    D0 = float(d.eval(t))
    D1 = float(d.eval(t + 1.0))
    Dp0 = float(d.eval_deriv(t, 1))
    Dp1 = float(d.eval_deriv(t + 1.0, 1))
    return norm * ((Dp1 - Dp0) * D0 - (D1 - D0) * Dp0) / D0**3


# ---------------------------------------------------------------------------
# Serialisation (the `delta build` / `delta verify` document)
# ---------------------------------------------------------------------------

def delta_to_dict(d: DeltaFunction, u_spec: str) -> dict:
    return {
        "u": u_spec,
        "levels": d.levels,
        "schedule": {
            "tau": list(d.schedule.tau),
            "mu": list(d.schedule.mu),
            "log_mu_abs": list(d.schedule.log_mu_abs),
        },
        "truncation": {
            "K": list(d.k_bounds),
            "tail_bound": d.tail_bound,
            "tail_eps": d.tail_eps,
        },
        "base": {
            "bridge_a": BRIDGE_A,
            "bridge_b": BRIDGE_B,
            "blend": [2.0, 3.0],
            "tail_start": 3.0,
        },
    }


def delta_from_dict(doc: dict) -> tuple[DeltaFunction, TargetSequence, str]:
    u_spec = doc["u"]
    u = parse_u(u_spec)
    tau = tuple(int(t) for t in doc["schedule"]["tau"])
    mu = tuple(float(m) for m in doc["schedule"]["mu"])
    sched = DeltaSchedule(u, tau, mu) if tau else empty_schedule()
    d = DeltaFunction.build(sched, float(doc["truncation"]["tail_eps"]))
    return d, u, u_spec


def save_delta(d: DeltaFunction, u_spec: str, path) -> None:
    with open(path, "w") as fh:
        json.dump(delta_to_dict(d, u_spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_delta(path) -> tuple[DeltaFunction, TargetSequence, str]:
    with open(path) as fh:
        return delta_from_dict(json.load(fh))
