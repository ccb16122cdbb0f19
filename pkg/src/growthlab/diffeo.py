"""Interval diffeomorphisms of [0, 1] with derivative oracles.

Every map here fixes 0 and 1 and has positive derivative.  The closed-form
zoo (identity, Mobius, polynomial perturbation) ships exact derivatives to
any order; wrappers (iterates, inverses, rescaled-to-subinterval copies)
compose the oracles.  Inverse evaluation falls back to bracketed
bisection + Newton on the strictly monotone forward map when no closed form
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basefn import OrderUnavailableError


class GrowthLabError(Exception):
    pass


class PreconditionError(GrowthLabError, ValueError):
    """An operation's input contract was violated."""


class InvariantViolationError(GrowthLabError, RuntimeError):
    """A structural invariant (positivity, monotonicity) failed at runtime."""


class ConvergenceError(GrowthLabError, RuntimeError):
    """An iterative solve did not converge."""


class IntervalDiffeo:
    """Base interface: eval / deriv / optional higher derivatives.

    Subclasses must make eval strictly increasing with eval(0) = 0 and
    eval(1) = 1 (up to evaluation tolerance).  All instances are immutable
    after construction and safe to share between threads.
    """

    name: str = "diffeo"
    params: dict = {}
    #: kernel family code understood by the compiled backend, or None
    kernel_code: tuple | None = None
    #: highest derivative order deriv_k supports (None = unlimited)
    max_order: int | None = None

    def eval(self, x):
        raise NotImplementedError

    def deriv(self, x):
        raise NotImplementedError

    def deriv2(self, x):
        return self.deriv_k(x, 2)

    def deriv_k(self, x, k: int):
        raise OrderUnavailableError(f"{self.name}: derivative order {k} unavailable")

    @property
    def has_deriv2(self) -> bool:
        try:
            self.deriv2(0.5)
            return True
        except OrderUnavailableError:
            return False

    def inverse(self) -> "IntervalDiffeo":
        return NumericInverse(self)

    def eval_inverse(self, y):
        return invert_monotone(self, y)

    def spec_string(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{inner}"


class Identity(IntervalDiffeo):
    name = "identity"
    kernel_code = (0, 0.0, 0.0)
    max_order = None

    def eval(self, x):
        return np.asarray(x, dtype=float) + 0.0

    def deriv(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def deriv_k(self, x, k):
        x = np.asarray(x, dtype=float)
        return np.ones_like(x) if k == 1 else np.zeros_like(x)

    def inverse(self):
        return self

    def eval_inverse(self, y):
        return np.asarray(y, dtype=float) + 0.0


class Mobius(IntervalDiffeo):
    """f(x) = lam*x / (1 + (lam-1)*x), lam > 0.

    Iterates stay in the family: f^n has parameter lam**n.  Fixed points are
    0 (multiplier lam) and 1 (multiplier 1/lam).
    """

    def __init__(self, lam: float):
        if lam <= 0:
            raise PreconditionError(f"mobius needs lambda > 0, got {lam}")
        self.lam = float(lam)
        self.name = "mobius"
        self.params = {"lambda": self.lam}
        self.kernel_code = (1, self.lam, 0.0)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return self.lam * x / (1.0 + (self.lam - 1.0) * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        w = 1.0 + (self.lam - 1.0) * x
        return self.lam / (w * w)

    def deriv_k(self, x, k):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return self.eval(x)
        w = 1.0 + (self.lam - 1.0) * x
        sign = 1.0 if (k - 1) % 2 == 0 else -1.0
        return sign * math.factorial(k) * self.lam * (self.lam - 1.0) ** (k - 1) / w ** (k + 1)

    def inverse(self):
        return Mobius(1.0 / self.lam)

    def eval_inverse(self, y):
        return self.inverse().eval(y)

    def iterate_closed_form(self, n: int, x):
        """Exact f^n via the group law; used as a test oracle."""
        return Mobius(self.lam**n).eval(x) if n != 0 else np.asarray(x, dtype=float) + 0.0


class PolyPerturb(IntervalDiffeo):
    """f(x) = x + c * x**(p+1) * (1-x)**(p+1).

    Both endpoints are degenerate fixed points of order p (f' = 1 there,
    first nonvanishing higher derivative is f^(p+1)).  The constructor
    rejects c large enough to destroy monotonicity.
    """

    def __init__(self, p: int, c: float):
        if p < 1 or int(p) != p:
            raise PreconditionError(f"poly needs integer p >= 1, got {p}")
        self.p = int(p)
        self.c = float(c)
        self.name = "poly"
        self.params = {"p": self.p, "c": self.c}
        self.kernel_code = (2, self.c, float(self.p))
        # coefficient table of x^(p+1)(1-x)^(p+1) and its derivatives
        pw = np.polynomial.Polynomial([0.0, 1.0]) * np.polynomial.Polynomial([1.0, -1.0])
        bump = pw ** (self.p + 1)
        self._derivs = [bump]
        for _ in range(2 * self.p + 2):
            self._derivs.append(self._derivs[-1].deriv())
        probe = np.linspace(0.0, 1.0, 4097)
        if np.min(self.deriv(probe)) <= 0.0:
            raise PreconditionError(
                f"poly p={self.p}, c={self.c}: f' <= 0 somewhere, perturbation too strong"
            )

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        xe = x * (1.0 - x)
        return x + self.c * xe ** (self.p + 1)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        xe = x * (1.0 - x)
        return 1.0 + self.c * (self.p + 1) * xe**self.p * (1.0 - 2.0 * x)

    def deriv_k(self, x, k):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return self.eval(x)
        if k > 2 * self.p + 2:
            return np.zeros_like(x)
        base = self._derivs[k](x)
        if k == 1:
            return 1.0 + self.c * base
        return self.c * base


class Rescaled(IntervalDiffeo):
    """Copy of an inner diffeomorphism squeezed into [lo, hi], identity outside."""

    def __init__(self, inner: IntervalDiffeo, lo: float = 1.0 / 3.0, hi: float = 2.0 / 3.0):
        if not 0.0 <= lo < hi <= 1.0:
            raise PreconditionError(f"bad support interval [{lo}, {hi}]")
        self.inner = inner
        self.lo = float(lo)
        self.hi = float(hi)
        self.width = self.hi - self.lo
        self.name = "rescaled"
        self.params = {"inner": inner.spec_string(), "lo": self.lo, "hi": self.hi}
        self.max_order = inner.max_order

    def _local(self, x):
        return (np.asarray(x, dtype=float) - self.lo) / self.width

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        out = x + 0.0
        if np.any(inside):
            out = np.where(
                inside, self.lo + self.width * self.inner.eval(self._local(x)), out
            )
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lo) & (x < self.hi)
        return np.where(inside, self.inner.deriv(self._local(x)), 1.0)

    def deriv_k(self, x, k):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return self.eval(x)
        inside = (x > self.lo) & (x < self.hi)
        inner_k = self.inner.deriv_k(self._local(x), k) * self.width ** (1 - k)
        outer = 1.0 if k == 1 else 0.0
        return np.where(inside, inner_k, outer)

    def eval_inverse(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y > self.lo) & (y < self.hi)
        out = y + 0.0
        if np.any(inside):
            out = np.where(
                inside,
                self.lo + self.width * self.inner.eval_inverse(self._local(y)),
                out,
            )
        return out

    def inverse(self):
        return Rescaled(self.inner.inverse(), self.lo, self.hi)


class NumericInverse(IntervalDiffeo):
    """Inverse of an arbitrary map via monotone root finding."""

    def __init__(self, forward: IntervalDiffeo):
        self.forward = forward
        self.name = f"inverse({forward.name})"
        self.params = forward.params
        self.max_order = 2 if forward.has_deriv2 else 1

    def eval(self, x):
        return self.forward.eval_inverse(x)

    def deriv(self, x):
        return 1.0 / self.forward.deriv(self.forward.eval_inverse(x))

    def deriv_k(self, x, k):
        if k == 1:
            return self.deriv(x)
        if k == 2:
            # (f^-1)'' = -f''(y) / f'(y)^3 at y = f^-1(x)
            y = self.forward.eval_inverse(x)
            return -self.forward.deriv2(y) / self.forward.deriv(y) ** 3
        raise OrderUnavailableError(f"numeric inverse exposes orders <= 2, asked {k}")

    def inverse(self):
        return self.forward

    def eval_inverse(self, y):
        return self.forward.eval(y)


def invert_monotone(f: IntervalDiffeo, y, tol: float = 1e-14, max_iter: int = 200):
    """Solve f(x) = y on [0, 1] by bisection with Newton polish, vectorised."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y).astype(float)
    if np.any((y < -1e-12) | (y > 1.0 + 1e-12)):
        bad = y[(y < -1e-12) | (y > 1.0 + 1e-12)][0]
        raise PreconditionError(f"inverse target {bad} outside [0, 1]")
    y = np.clip(y, 0.0, 1.0)
    lo = np.zeros_like(y)
    hi = np.ones_like(y)
    x = y.copy()  # maps here are perturbations of the identity; y is a fine seed
    for _ in range(max_iter):
        fx = f.eval(x)
        err = fx - y
        if np.all(np.abs(err) <= tol):
            break
        above = err > 0
        hi = np.where(above, np.minimum(hi, x), hi)
        lo = np.where(~above, np.maximum(lo, x), lo)
        d = f.deriv(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0, err / np.where(d > 0, d, 1.0), 0.0)
        xn = x - step
        bad = (xn <= lo) | (xn >= hi) | ~np.isfinite(xn)
        x = np.where(bad, 0.5 * (lo + hi), xn)
    else:
        worst = float(np.max(np.abs(f.eval(x) - y)))
        raise ConvergenceError(
            f"monotone inversion stalled: residual {worst:.3e} > {tol:.1e} "
            f"with bracket width {float(np.max(hi - lo)):.3e}"
        )
    return float(x[0]) if scalar else x


def eval_iterate(f: IntervalDiffeo, n: int, x):
    """f^n(x) for any integer n (negative n uses inverse iterates)."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return x + 0.0
    g = f if n > 0 else f.inverse()
    y = x
    for _ in range(abs(n)):
        y = g.eval(y)
    return y


def log_orbit_derivative(f: IntervalDiffeo, n: int, x):
    """log (f^n)'(x) as a sum of log f' along the orbit; never forms products.

    For n < 0 this is -sum_{j=1..|n|} log f'(f^-j x).
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    if n == 0:
        return total
    if n > 0:
        y = x + 0.0
        for _ in range(n):
            d = f.deriv(y)
            if np.any(d <= 0.0):
                raise InvariantViolationError("f' <= 0 encountered along orbit")
            total += np.log(d)
            y = f.eval(y)
    else:
        g = f.inverse()
        y = x + 0.0
        for _ in range(-n):
            y = g.eval(y)
            d = f.deriv(y)
            if np.any(d <= 0.0):
                raise InvariantViolationError("f' <= 0 encountered along orbit")
            total -= np.log(d)
    return total


# ---------------------------------------------------------------------------
# Map mini-language
# ---------------------------------------------------------------------------
#
#   identity | mobius:lambda=<float> | poly:p=<int>,c=<float> | flatflow:file=<path>
#
# Families living in other modules (the flow) register themselves here at
# import, keeping the parser extensible without circular imports.

_MAP_FAMILIES: dict[str, callable] = {}


def register_map_family(name: str, builder) -> None:
    _MAP_FAMILIES[name] = builder


def parse_map_spec(spec: str) -> IntervalDiffeo:
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise PreconditionError(f"bad map parameter '{item}' in '{spec}'")
            params[key.strip()] = val.strip()
    if name == "identity":
        return Identity()
    if name == "mobius":
        if "lambda" not in params:
            raise PreconditionError("mobius spec needs lambda=<float>")
        return Mobius(float(params["lambda"]))
    if name == "poly":
        if "p" not in params or "c" not in params:
            raise PreconditionError("poly spec needs p=<int>,c=<float>")
        return PolyPerturb(int(params["p"]), float(params["c"]))
    if name in _MAP_FAMILIES:
        return _MAP_FAMILIES[name](params)
    raise PreconditionError(f"unknown map family '{name}' in spec '{spec}'")


# ---------------------------------------------------------------------------
# Fixed points
# ---------------------------------------------------------------------------

FIXED_POINT_TOL = 1e-10
DEGENERATE_TOL = 1e-6
_IDENTITY_RUN = 10


@dataclass(frozen=True)
class FixedPointSet:
    points: list[float]
    multipliers: list[float]
    degenerate_flags: list[bool]
    identity_intervals: list[tuple[float, float]] = field(default_factory=list)

    def max_multiplier_gap(self) -> float:
        """max over fixed points of max(f'(xi), 1/f'(xi)); cross-check for gamma."""
        best = 1.0
        for m in self.multipliers:
            best = max(best, m, 1.0 / m)
        return best


def find_fixed_points(f: IntervalDiffeo, resolution: int = 4096) -> FixedPointSet:
    """Bracket sign changes of f(x) - x on a uniform grid, bisect to 1e-12.

    Runs of >= 10 consecutive grid points with |f(x) - x| below 1e-10 are
    reported as identity intervals; near-tangencies (local minima of |f - x|
    under tolerance without a sign change) are kept with a degenerate flag
    rather than polished into a root.
    """
    if resolution < 2:
        raise PreconditionError(f"resolution must be >= 2, got {resolution}")
    grid = np.linspace(0.0, 1.0, resolution + 1)
    g = f.eval(grid) - grid

    below = np.abs(g) < FIXED_POINT_TOL
    identity_intervals: list[tuple[float, float]] = []
    run_start = None
    for i, b in enumerate(below):
        if b and run_start is None:
            run_start = i
        elif not b and run_start is not None:
            if i - run_start >= _IDENTITY_RUN:
                identity_intervals.append((grid[run_start], grid[i - 1]))
            run_start = None
    if run_start is not None and len(below) - run_start >= _IDENTITY_RUN:
        identity_intervals.append((grid[run_start], grid[-1]))

    def in_identity(x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in identity_intervals)

    points = [0.0, 1.0]
    for i in range(len(grid) - 1):
        if in_identity(grid[i]) and in_identity(grid[i + 1]):
            continue
        a, b = grid[i], grid[i + 1]
        ga, gb = g[i], g[i + 1]
        if ga == 0.0 and a not in points:
            points.append(float(a))
            continue
        if ga * gb < 0.0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                gm = float(f.eval(mid) - mid)
                if b - a < 1e-12:
                    break
                if ga * gm <= 0.0:
                    b, gb = mid, gm
                else:
                    a, ga = mid, gm
            root = 0.5 * (a + b)
            if all(abs(root - q) > 1e-9 for q in points):
                points.append(root)
    # tangencies: interior local minima of |f - x| under tolerance, no sign change
    absg = np.abs(g)
    for i in range(1, len(grid) - 1):
        if (
            absg[i] < FIXED_POINT_TOL
            and absg[i] <= absg[i - 1]
            and absg[i] <= absg[i + 1]
            and not in_identity(grid[i])
            and all(abs(grid[i] - q) > 1e-9 for q in points)
        ):
            points.append(float(grid[i]))

    points = sorted(points)
    multipliers = [float(f.deriv(x)) for x in points]
    degenerate = [abs(m - 1.0) < DEGENERATE_TOL for m in multipliers]
    return FixedPointSet(points, multipliers, degenerate, identity_intervals)


# ---------------------------------------------------------------------------
# Endpoint flatness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatnessReport:
    endpoint: float
    #: magnitudes[i] = limiting |f^(i)(p)| for i >= 2, and |f'(p) - 1| for i = 1
    magnitudes: dict[int, float]
    #: first i with magnitude above tol, or None if flat through max_order
    first_nonflat_order: int | None
    #: order of the fixed point (smallest p with f^(p+1) != 0), when visible
    fixed_point_order: int | None
    tol: float


def flatness_report(
    f: IntervalDiffeo,
    max_order: int = 4,
    tol: float = 1e-4,
    ladder: np.ndarray | None = None,
) -> dict[float, FlatnessReport]:
    """Per-endpoint derivative magnitudes along a geometric approach ladder.

    The reported magnitude for order i is the value at the ladder point
    closest to the endpoint (derivative oracles for all shipped families are
    exact, so no extrapolation is attempted).
    """
    if f.max_order is not None and max_order > f.max_order:
        raise OrderUnavailableError(
            f"{f.name}: order {max_order} unavailable (max {f.max_order})"
        )
    if ladder is None:
        ladder = 2.0 ** -np.arange(10, 46, dtype=float)
    reports = {}
    for endpoint in (0.0, 1.0):
        xs = endpoint + ladder if endpoint == 0.0 else endpoint - ladder
        mags: dict[int, float] = {}
        first_bad = None
        for i in range(1, max_order + 1):
            vals = f.deriv_k(xs, i)
            seq = np.abs(vals - 1.0) if i == 1 else np.abs(vals)
            mag = float(seq[-1])
            mags[i] = mag
            if first_bad is None and mag > tol:
                first_bad = i
        fp_order = None
        if abs(mags.get(1, 0.0)) <= tol:
            for i in range(2, max_order + 1):
                if mags[i] > tol:
                    fp_order = i - 1
                    break
        reports[endpoint] = FlatnessReport(endpoint, mags, first_bad, fp_order, tol)
    return reports
