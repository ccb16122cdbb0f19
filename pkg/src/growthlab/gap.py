"""Distortion machinery and the quadratic-gap certificate.

For a C^2 map with exponential rate 1, the growth sequence is at most
quadratic.  The chain:

* v(f)  -- total variation of log f' (for C^2 maps, integral of |f''/f'|);
* L(f)  -- Lipschitz constant of log f', i.e. max |f''/f'|;
* C(f)  = L(f) * exp(v(f));
* almost convexity: 2 a_n - a_{n-1} - a_{n+1} <= C(f) exp(-a_n);
* the dichotomy on such sequences: either a_n <= 2 log(n sqrt(C/2) + 1) for
  every n, or a_n grows at least linearly.

The dichotomy is asymptotic, so verdicts here are relative to the computed
window and an explicit Inconclusive verdict exists for sequences whose first
bound exceedance is too close to the end of the data.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .diffeo import IntervalDiffeo, PreconditionError
from .growth import GridSpec, GrowthRecord, grid_slack_estimate, growth_sequence
from .quadrature import adaptive_simpson


@dataclass(frozen=True)
class RegularityData:
    variation: float   # v(f)
    lipschitz: float   # L(f)
    c_const: float     # L(f) * e^{v(f)}, assembled exactly from the two fields


def regularity_constants(f: IntervalDiffeo, resolution: int = 4096) -> RegularityData:
    """v(f) by adaptive quadrature of |f''/f'|, L(f) by a refined grid max."""
    if not f.has_deriv2:
        raise PreconditionError(f"{f.name} exposes no second derivative oracle")

    def integrand(x):
        return np.abs(f.deriv2(x) / f.deriv(x))

    grid = GridSpec(uniform=resolution, ladder_count=40).points()
    variation = adaptive_simpson(integrand, 0.0, 1.0, tol=1e-8, breakpoints=grid[1:-1:8])
    lipschitz = float(np.max(integrand(grid)))
    return RegularityData(variation, lipschitz, lipschitz * math.exp(variation))


# ---------------------------------------------------------------------------
# Denjoy distortion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistortionReport:
    interval: tuple[float, float]
    n: int
    variation: float
    min_ratio: float
    max_ratio: float
    slack: float

    @property
    def ok(self) -> bool:
        lo = math.exp(-self.variation) - self.slack
        hi = math.exp(self.variation) + self.slack
        return lo <= self.min_ratio and self.max_ratio <= hi


def denjoy_check(
    f: IntervalDiffeo,
    J: tuple[float, float],
    n: int,
    samples: int = 64,
    variation: float | None = None,
    slack: float = 1e-9,
) -> DistortionReport:
    """Verify e^{-v} <= (f^n)'(x)/(f^n)'(y) <= e^{v} for x, y in J.

    Requires fJ and J disjoint (checked first); the extremal observed ratio
    over all sampled pairs is returned.
    """
    a, b = float(J[0]), float(J[1])
    if not 0.0 <= a < b <= 1.0:
        raise PreconditionError(f"J = [{a}, {b}] is not a closed subinterval of [0, 1]")
    fa, fb = float(f.eval(a)), float(f.eval(b))
    if fa < b and a < fb:
        raise PreconditionError(
            f"fJ and J overlap: fJ = [{fa:.6g}, {fb:.6g}] meets J = [{a:.6g}, {b:.6g}]"
        )
    if variation is None:
        variation = regularity_constants(f).variation
    xs = np.linspace(a, b, samples)
    logs = np.zeros_like(xs)
    y = xs.copy()
    for _ in range(n):
        logs += np.log(f.deriv(y))
        y = f.eval(y)
    spread = logs[:, None] - logs[None, :]
    return DistortionReport(
        (a, b), n, variation, float(np.exp(spread.min())), float(np.exp(spread.max())), slack
    )


# ---------------------------------------------------------------------------
# Almost convexity
# ---------------------------------------------------------------------------

def near_convexity_check(
    records: list[GrowthRecord],
    reg: RegularityData,
    slack: float = 1e-6,
    grid_slack: float = 0.0,
) -> dict[str, list[int]]:
    """Indices violating 2a_n - a_{n-1} - a_{n+1} <= C e^{-a_n} + slack.

    Checked for the forward and backward sequences separately, with a_0 = 0
    prepended to each.
    """
    out = {}
    for key, seq in (
        ("fwd", [r.a_fwd for r in records]),
        ("bwd", [r.a_bwd for r in records]),
    ):
        a = np.concatenate([[0.0], np.asarray(seq)])
        n = np.arange(1, len(a) - 1)
        lhs = 2 * a[n] - a[n - 1] - a[n + 1]
        rhs = reg.c_const * np.exp(-a[n]) + slack + grid_slack
        out[key] = [int(j) for j in n[lhs > rhs]]
    return out


# ---------------------------------------------------------------------------
# The sequence dichotomy
# ---------------------------------------------------------------------------

class Verdict(enum.Enum):
    LOG_BOUND = "LogBound"
    LINEAR_GROWTH = "LinearGrowth"
    NOT_SUBSOLUTION = "NotSubsolution"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RealSequence:
    """a_0, a_1, ..., a_N with a_0 = 0, plus the convexity constant C > 0."""

    values: np.ndarray
    c_const: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.c_const <= 0.0:
            raise PreconditionError(f"C must be positive, got {self.c_const}")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("sequence contains non-finite values")
        if abs(vals[0]) > 1e-12:
            raise PreconditionError(f"a_0 must be 0, got {vals[0]}")


@dataclass(frozen=True)
class ClassificationVerdict:
    verdict: Verdict
    witness: int | None          # first index violating/achieving the key inequality
    slope_estimate: float | None  # min of a_n/n over the final quarter (LinearGrowth)
    bound_coefficient: float     # sqrt(C/2), the D in the log bound


def log_bound(n, c_const: float):
    """The comparison sequence h_n = 2 log(n sqrt(C/2) + 1)."""
    return 2.0 * np.log(np.asarray(n, dtype=float) * math.sqrt(c_const / 2.0) + 1.0)


def growth_lemma_classify(seq: RealSequence, slack: float = 0.0) -> ClassificationVerdict:
    """Dichotomy for sub-solutions of L_j p = C e^{-p_j}.

    Order of checks: (1) the sub-solution hypothesis at every interior index,
    violation -> NotSubsolution; (2) the log bound at every index, all pass
    -> LogBound; (3) otherwise LinearGrowth with the first exceedance as
    witness, demoted to Inconclusive when that first exceedance falls within
    10 indices of the end of the data.
    """
    a = seq.values
    C = seq.c_const
    D = math.sqrt(C / 2.0)
    N = len(a) - 1
    if N < 1:
        raise PreconditionError("need at least a_0, a_1")

    # Second differences are only known to rounding accuracy of their
    # operands; without this floor, C e^{-a_n} eventually drops below the
    # noise of 2a_n - a_{n-1} - a_{n+1} and exact sub-solutions (e.g. linear
    # sequences) get flagged spuriously.
    eps = np.finfo(float).eps

    interior = np.arange(1, N)
    if interior.size:
        lhs = 2 * a[interior] - a[interior - 1] - a[interior + 1]
        rhs = C * np.exp(-a[interior]) + slack
        floor = 8.0 * eps * (
            np.abs(a[interior - 1]) + 2.0 * np.abs(a[interior]) + np.abs(a[interior + 1])
        )
        bad = interior[lhs > rhs + floor]
        if bad.size:
            return ClassificationVerdict(Verdict.NOT_SUBSOLUTION, int(bad[0]), None, D)

    ns = np.arange(1, N + 1)
    hb = log_bound(ns, C)
    over = ns[a[1:] > hb + slack + 8.0 * eps * (np.abs(a[1:]) + np.abs(hb))]
    if over.size == 0:
        return ClassificationVerdict(Verdict.LOG_BOUND, None, None, D)

    witness = int(over[0])
    if witness > N - 10:
        return ClassificationVerdict(Verdict.INCONCLUSIVE, witness, None, D)
    tail = ns[ns >= max(1, (3 * N) // 4)]
    slope = float(np.min(a[tail] / tail))
    return ClassificationVerdict(Verdict.LINEAR_GROWTH, witness, slope, D)


def supersolution_margin(c_const: float, j) -> np.ndarray:
    """L_j h - C e^{-h_j} for h_j = 2 log(jD + 1), via a cancellation-free form.

    L_j h = -2 log1p(-D^2/(jD+1)^2) and C e^{-h_j} = 2 D^2/(jD+1)^2, so the
    margin is positive for every j >= 1 -- the comparison sequence is a
    strict super-solution.  Direct second differencing of stored h_j values
    loses this below j ~ 4000 in double precision; this form does not.
    """
    D = math.sqrt(c_const / 2.0)
    j = np.asarray(j, dtype=float)
    x = D * D / (j * D + 1.0) ** 2
    return -2.0 * np.log1p(-x) - 2.0 * x


# ---------------------------------------------------------------------------
# End-to-end certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapCertificate:
    gamma: float
    c_const: float
    verdict_fwd: Verdict
    verdict_bwd: Verdict
    bound_violations: list[int]   # n with Gamma_n above (n sqrt(C/2) + 1)^2
    convexity_violations: dict[str, list[int]]
    analytic_slack: float
    grid_slack: float
    n_max: int

    @property
    def quadratic_bound_applies(self) -> bool:
        return self.verdict_fwd == Verdict.LOG_BOUND and self.verdict_bwd == Verdict.LOG_BOUND

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "C": self.c_const,
            "verdict_fwd": self.verdict_fwd.value,
            "verdict_bwd": self.verdict_bwd.value,
            "bound_violations": self.bound_violations,
            "convexity_violations": self.convexity_violations,
            "slack": {"analytic": self.analytic_slack, "grid": self.grid_slack},
            "n_max": self.n_max,
        }


def certify_gap(
    f: IntervalDiffeo,
    n_max: int,
    grid: GridSpec | None = None,
    analytic_slack: float = 1e-6,
) -> GapCertificate:
    """Assemble the full certificate for one map.

    Computes the regularity constants, the growth records, the almost
    convexity check, the classifier on both directional sequences, and the
    pointwise comparison Gamma_n <= (n sqrt(C/2) + 1)^2.  For maps classified
    hyperbolic (LinearGrowth) the quadratic bound is not asserted; the
    certificate records the branch instead.
    """
    reg = regularity_constants(f)
    records = growth_sequence(f, n_max, grid)
    gslack = grid_slack_estimate(f, min(n_max, 256), grid)
    convexity = near_convexity_check(records, reg, analytic_slack, gslack)

    verdicts = {}
    for key in ("fwd", "bwd"):
        seq = np.concatenate(
            [[0.0], [getattr(r, f"a_{key}") for r in records]]
        )
        if reg.c_const == 0.0:
            # log f' is constant (identity-like); the comparison sequence
            # degenerates to 0 and "at most quadratic" means a_n <= 0
            verdict = (
                Verdict.LOG_BOUND
                if float(np.max(np.abs(seq))) <= analytic_slack + gslack
                else Verdict.NOT_SUBSOLUTION
            )
            verdicts[key] = ClassificationVerdict(verdict, None, None, 0.0)
        else:
            verdicts[key] = growth_lemma_classify(
                RealSequence(seq, reg.c_const), slack=analytic_slack + gslack
            )

    probe = min(n_max, 512)
    gamma = math.exp(records[probe - 1].log_gamma / probe)

    violations = []
    if verdicts["fwd"].verdict == Verdict.LOG_BOUND and verdicts["bwd"].verdict == Verdict.LOG_BOUND:
        ns = np.arange(1, n_max + 1)
        bound = log_bound(ns, reg.c_const)
        lg = np.array([r.log_gamma for r in records])
        violations = [int(n) for n in ns[lg > bound + analytic_slack + gslack]]

    return GapCertificate(
        gamma=gamma,
        c_const=reg.c_const,
        verdict_fwd=verdicts["fwd"].verdict,
        verdict_bwd=verdicts["bwd"].verdict,
        bound_violations=violations,
        convexity_violations=convexity,
        analytic_slack=analytic_slack,
        grid_slack=gslack,
        n_max=n_max,
    )
