"""Radial extension of an interval map to the Euclidean ball.

A 1-D map fixing [0, 1/3] and [2/3, 1] pointwise extends to the closed unit
ball of any dimension by g(x) = x * h(|x|)/|x|.  The differential splits
orthogonally into a radial factor (h^n)'(|x|) and a tangential factor
h^n(|x|)/|x|, so the operator norm (and hence the growth sequence of g)
reduces to scalar maxima over the radial profile -- no m-dimensional
sampling is needed, and the tangential factor stays inside [1/2, 2] on the
annulus.  That pins the sandwich

    Gamma_n(h) <= Gamma_n(g) <= max(2, Gamma_n(h)),

with equality on the right as soon as Gamma_n(h) > 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffeo import IntervalDiffeo, PreconditionError, Rescaled
from .growth import GridSpec, growth_sequence


@dataclass(frozen=True)
class RadialMap:
    h1d: IntervalDiffeo
    dim: int

    def eval(self, x: np.ndarray) -> np.ndarray:
        """g(x) = x h(|x|)/|x| for a point of the dim-ball (vector input)."""
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0.0:
            return x
        # scalar factor first: where h fixes r the ratio is exactly 1
        return x * (float(self.h1d.eval(r)) / r)


def build_radial(h1d: IntervalDiffeo, dim: int, samples: int = 512) -> RadialMap:
    """Checks that h1d is the identity outside the middle third, then wraps it."""
    if dim < 1:
        raise PreconditionError(f"ball dimension must be >= 1, got {dim}")
    outer = np.concatenate(
        [np.linspace(0.0, 1.0 / 3.0, samples), np.linspace(2.0 / 3.0, 1.0, samples)]
    )
    dev = float(np.max(np.abs(h1d.eval(outer) - outer)))
    if dev > 1e-12:
        raise PreconditionError(
            f"{h1d.name} moves points outside [1/3, 2/3] by {dev:.3e}; "
            "radial extension needs identity there"
        )
    return RadialMap(h1d, dim)


def middle_third(inner: IntervalDiffeo) -> IntervalDiffeo:
    """Rescale a map of [0, 1] into [1/3, 2/3], identity outside."""
    return Rescaled(inner, 1.0 / 3.0, 2.0 / 3.0)


@dataclass(frozen=True)
class RadialGrowthRecord:
    n: int
    gamma_h: float        # 1-D growth of the profile
    radial_max: float     # max over the annulus of h^n(r)/r
    radial_min: float     # min over the annulus of h^n(r)/r
    gamma_g: float        # ball growth: max of all four factors

    @property
    def sandwich_ok(self) -> bool:
        return self.gamma_h <= self.gamma_g <= max(2.0, self.gamma_h)


def radial_growth(
    rm: RadialMap, n_max: int, grid: GridSpec | None = None
) -> list[RadialGrowthRecord]:
    """Growth records of the ball map for n = 1..n_max.

    Gamma_n(g) = max( max |(h^n)'|, max h^n(r)/r, and the two inverse
    counterparts ).  The inverse tangential factor max h^{-n}(r)/r equals
    1/min_r (h^n(r)/r) (substitute r = h^n(s)), so one forward radial scan
    suffices.
    """
    pts = (grid or GridSpec()).points()
    records_h = growth_sequence(rm.h1d, n_max, pts)

    annulus = pts[(pts > 0.0)]
    x = annulus.copy()
    out = []
    for n in range(1, n_max + 1):
        x = np.clip(rm.h1d.eval(x), 0.0, 1.0)
        ratio = x / annulus
        rmax = float(np.max(ratio))
        rmin = float(np.min(ratio))
        gamma_h = records_h[n - 1].gamma_n
        gamma_g = max(gamma_h, rmax, 1.0 / rmin)
        out.append(RadialGrowthRecord(n, gamma_h, rmax, rmin, gamma_g))
    return out
