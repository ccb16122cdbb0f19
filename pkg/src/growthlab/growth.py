"""Growth sequences: Gamma_n(f) = exp max(a_n(f), a_n(f^-1)).

a_n(f) is the maximum over a grid of log (f^n)', accumulated incrementally
along forward orbits (O(grid * n_max) total work).  The backward sequence
needs no inverse evaluations: substituting x = f^n(y) shows that the maximum
of log (f^-n)' over [0, 1] equals -min_y log (f^n)'(y), so one forward scan
yields both directions.

Everything is kept in log space; Gamma_n is only exponentiated for reports
(it reaches 2**40 in the test families).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .diffeo import IntervalDiffeo, PreconditionError, eval_iterate, find_fixed_points


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: uniform points plus geometric ladders at 0 and 1.

    The ladders (ratio**-j for j = 1..ladder_count, mirrored at 1) resolve
    maps whose derivative distortion concentrates at the endpoints, which is
    where the suprema of (f^n)' live for every shipped family.
    """

    uniform: int = 2048
    ladder_count: int = 60
    ladder_ratio: float = 2.0
    extra: tuple[float, ...] = ()

    def points(self) -> np.ndarray:
        js = np.arange(1, self.ladder_count + 1, dtype=float)
        ladder = self.ladder_ratio**-js
        pts = np.concatenate(
            [
                np.linspace(0.0, 1.0, self.uniform + 1),
                ladder,
                1.0 - ladder,
                np.asarray(self.extra, dtype=float),
            ]
        )
        pts = np.unique(np.clip(pts, 0.0, 1.0))
        return pts


@dataclass(frozen=True)
class GrowthRecord:
    n: int
    a_fwd: float
    a_bwd: float
    gamma_n: float
    grid_size: int

    @property
    def log_gamma(self) -> float:
        return max(self.a_fwd, self.a_bwd)


def _resolve_grid(grid) -> np.ndarray:
    if grid is None:
        grid = GridSpec()
    if isinstance(grid, GridSpec):
        return grid.points()
    return np.unique(np.asarray(grid, dtype=float))


def growth_sequence(
    f: IntervalDiffeo, n_max: int, grid: GridSpec | np.ndarray | None = None
) -> list[GrowthRecord]:
    """GrowthRecord for every n <= n_max over the given grid."""
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    pts = _resolve_grid(grid)
    if f.kernel_code is not None:
        kind, p1, p2 = f.kernel_code
        a_fwd, a_bwd = _backend.orbit_scan(kind, p1, p2, pts, n_max)
    else:
        a_fwd, a_bwd = _backend.generic_orbit_scan(f, pts, n_max)
    return [
        GrowthRecord(
            n=n + 1,
            a_fwd=float(a_fwd[n]),
            a_bwd=float(a_bwd[n]),
            gamma_n=math.exp(max(a_fwd[n], a_bwd[n])),
            grid_size=pts.size,
        )
        for n in range(n_max)
    ]


def log_gamma_array(records: list[GrowthRecord]) -> np.ndarray:
    return np.array([r.log_gamma for r in records])


def submultiplicativity_violations(
    records: list[GrowthRecord], slack: float = 1e-9
) -> list[tuple[int, int, float]]:
    """(n, m, excess) triples where log Gamma_{n+m} > log Gamma_n + log Gamma_m + slack."""
    lg = np.concatenate([[0.0], log_gamma_array(records)])
    bad = []
    n_max = len(records)
    for n in range(1, n_max):
        m = np.arange(1, n_max - n + 1)
        excess = lg[n + m] - lg[n] - lg[m]
        for j in np.nonzero(excess > slack)[0]:
            bad.append((n, int(m[j]), float(excess[j])))
    return bad


def grid_slack_estimate(f: IntervalDiffeo, n_max: int, grid: GridSpec | None = None) -> float:
    """Empirical grid error: max_n |a_n(grid) - a_n(refined grid)|.

    Used as the reproducible "grid slack" term wherever an inequality about
    true suprema is checked against grid maxima.
    """
    base = grid or GridSpec()
    fine = GridSpec(
        uniform=2 * base.uniform,
        ladder_count=base.ladder_count,
        ladder_ratio=math.sqrt(base.ladder_ratio),
        extra=base.extra,
    )
    rec_a = growth_sequence(f, n_max, base)
    rec_b = growth_sequence(f, n_max, fine)
    diff_f = np.abs(np.array([r.a_fwd for r in rec_a]) - np.array([r.a_fwd for r in rec_b]))
    diff_b = np.abs(np.array([r.a_bwd for r in rec_a]) - np.array([r.a_bwd for r in rec_b]))
    return float(max(diff_f.max(), diff_b.max()))


# ---------------------------------------------------------------------------
# Exponential growth rate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaEstimate:
    value: float                 # Gamma_{n_probe} ** (1/n_probe)
    probes: tuple[tuple[int, float], ...]  # last two (n, estimate) pairs
    fixed_point_value: float     # max over Fix(f) of max(f'(xi), 1/f'(xi))
    tolerance: float
    flagged: bool                # estimates disagree beyond tolerance

    def __float__(self) -> float:
        return self.value


def gamma_exponent(
    f: IntervalDiffeo,
    n_probe: int = 256,
    grid: GridSpec | None = None,
    tolerance: float = 1e-2,
) -> GammaEstimate:
    """Gamma_n ** (1/n) at the probe, cross-checked against fixed-point multipliers.

    Disagreement beyond the tolerance sets the flag; the two values are never
    averaged.
    """
    records = growth_sequence(f, n_probe, grid)
    half = max(1, n_probe // 2)
    est_half = math.exp(records[half - 1].log_gamma / half)
    est_full = math.exp(records[-1].log_gamma / n_probe)
    fps = find_fixed_points(f)
    cross = fps.max_multiplier_gap()
    flagged = abs(est_full - cross) > tolerance
    return GammaEstimate(
        value=est_full,
        probes=((half, est_half), (n_probe, est_full)),
        fixed_point_value=cross,
        tolerance=tolerance,
        flagged=flagged,
    )


# ---------------------------------------------------------------------------
# Orbit gaps and the reciprocal-sum bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitGaps:
    x0: float
    deltas: np.ndarray           # delta_n = x_{n+1} - x_n (all the same sign)
    direction: int               # sign of f(x0) - x0
    saturated_at: int | None     # n where the orbit hit a fixed point numerically


@dataclass(frozen=True)
class GapBoundReport:
    gaps: OrbitGaps
    n_checked: int
    violations: list[int]        # n with Gamma_n < |delta_0/delta_n| (slack applied)
    reciprocal_partial_sums: np.ndarray
    reciprocal_bound: float      # 1/|delta_0|

    @property
    def ok(self) -> bool:
        return (
            not self.violations
            and bool(np.all(np.diff(self.reciprocal_partial_sums) >= 0.0))
            and float(self.reciprocal_partial_sums[-1]) <= self.reciprocal_bound
        )


def orbit_gaps(f: IntervalDiffeo, x0: float, n_max: int) -> OrbitGaps:
    v0 = float(f.eval(x0)) - x0
    if v0 == 0.0:
        raise PreconditionError(f"x0 = {x0} is a fixed point of {f.name}")
    direction = 1 if v0 > 0 else -1
    xs = [float(x0)]
    saturated = None
    for n in range(n_max + 1):
        nxt = float(f.eval(xs[-1]))
        if nxt == xs[-1]:
            # orbit absorbed by a fixed point at double precision
            saturated = n
            break
        xs.append(nxt)
    deltas = np.diff(np.array(xs))
    return OrbitGaps(float(x0), deltas, direction, saturated)


def orbit_gap_bound(
    f: IntervalDiffeo,
    x0: float,
    n_max: int,
    grid: GridSpec | None = None,
    slack: float = 1e-9,
) -> GapBoundReport:
    """Check Gamma_n >= |delta_0/delta_n| and the bounded reciprocal sums.

    The reciprocal partial sums of 1/Gamma_n are nondecreasing by positivity
    and bounded by 1/|delta_0| because sum |delta_n| <= 1.
    """
    gaps = orbit_gaps(f, x0, n_max)
    n_eff = min(n_max, len(gaps.deltas) - 1)
    if n_eff < 1:
        raise PreconditionError(
            f"orbit from x0 = {x0} saturates immediately; nothing to check"
        )
    records = growth_sequence(f, n_eff, grid)
    lg = log_gamma_array(records)
    d0 = abs(float(gaps.deltas[0]))
    violations = []
    for n in range(1, n_eff + 1):
        dn = abs(float(gaps.deltas[n]))
        if lg[n - 1] + slack < math.log(d0) - math.log(dn):
            violations.append(n)
    reciprocals = np.exp(-lg)
    partial = np.cumsum(reciprocals)
    return GapBoundReport(gaps, n_eff, violations, partial, 1.0 / d0)
