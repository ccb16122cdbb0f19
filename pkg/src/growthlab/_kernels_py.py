"""Pure NumPy implementations of the hot kernels.

Two inner loops dominate the package's runtime and exist in both this module
and the compiled extension (growthlab._fast):

* orbit_scan        -- incremental growth-sequence scan for the closed-form
                       families (cost O(grid * n_max));
* hump_series_sum   -- the positive bump-series sum used for every
                       evaluation of the oscillating density.

Either backend may be selected at import; see growthlab._backend.
"""

from __future__ import annotations

import numpy as np

from .basefn import h_value

BACKEND_NAME = "numpy"


def _family_eval_deriv(kind: int, p1: float, p2: float):
    if kind == 0:
        return (lambda x: x, lambda x: np.ones_like(x))
    if kind == 1:
        lam = p1

        def ev(x):
            return lam * x / (1.0 + (lam - 1.0) * x)

        def dv(x):
            w = 1.0 + (lam - 1.0) * x
            return lam / (w * w)

        return ev, dv
    if kind == 2:
        c, p = p1, int(p2)

        def ev(x):
            return x + c * (x * (1.0 - x)) ** (p + 1)

        def dv(x):
            return 1.0 + c * (p + 1) * (x * (1.0 - x)) ** p * (1.0 - 2.0 * x)

        return ev, dv
    raise ValueError(f"unknown family kind {kind}")


def orbit_scan(kind: int, p1: float, p2: float, grid: np.ndarray, n_max: int):
    """Cumulative log-derivative scan along forward orbits of every grid point.

    Returns (a_fwd, a_bwd) with a_fwd[n-1] = max_x log (f^n)'(x) over the grid
    and a_bwd[n-1] = -min_x log (f^n)'(x), which equals the maximum of
    log (f^-n)' over the forward image of the grid (substitute x = f^n(y)).
    """
    ev, dv = _family_eval_deriv(kind, p1, p2)
    x = np.array(grid, dtype=float)
    s = np.zeros_like(x)
    a_fwd = np.empty(n_max)
    a_bwd = np.empty(n_max)
    for n in range(n_max):
        s += np.log(dv(x))
        x = np.clip(ev(x), 0.0, 1.0)
        a_fwd[n] = s.max()
        a_bwd[n] = -s.min()
    return a_fwd, a_bwd


def generic_orbit_scan(f, grid: np.ndarray, n_max: int):
    """Same scan driven through an IntervalDiffeo's eval/deriv callables."""
    x = np.array(grid, dtype=float)
    s = np.zeros_like(x)
    a_fwd = np.empty(n_max)
    a_bwd = np.empty(n_max)
    for n in range(n_max):
        d = f.deriv(x)
        if np.any(d <= 0.0):
            raise RuntimeError("f' <= 0 on the scan grid")
        s += np.log(d)
        x = np.clip(f.eval(x), 0.0, 1.0)
        a_fwd[n] = s.max()
        a_bwd[n] = -s.min()
    return a_fwd, a_bwd


def hump_series_sum(
    t: np.ndarray,
    weight: np.ndarray,
    scale: np.ndarray,
    center: np.ndarray,
    block: int = 4096,
) -> np.ndarray:
    """sum_k weight[k] * h(scale[k] * (t - center[k])), all terms positive.

    Terms are summed in ascending magnitude per evaluation point, which keeps
    the accumulation error at a couple of ulp even though the weights span
    many orders of magnitude.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    flat = t.ravel()
    res = out.ravel()
    for start in range(0, flat.size, block):
        tt = flat[start : start + block]
        terms = weight[:, None] * h_value(scale[:, None] * (tt[None, :] - center[:, None]))
        terms.sort(axis=0)
        res[start : start + block] = terms.sum(axis=0)
    return out
