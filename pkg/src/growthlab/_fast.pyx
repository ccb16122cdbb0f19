# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: the orbit growth scan and the positive bump-series sum.

Mirrors growthlab._kernels_py; the NumPy fallback is selected automatically
when this extension is unavailable (or GROWTHLAB_PURE=1).  The bump-series
accumulation uses Kahan compensation, which keeps the result within a couple
of ulp of the fallback's sorted summation for positive terms.
"""

import numpy as np

from libc.math cimport exp, log, sqrt

BACKEND_NAME = "compiled"

# bridge constants for the base bump (kept in sync through growthlab.basefn)
from .basefn import BRIDGE_A as _PY_A, BRIDGE_B as _PY_B

cdef double BRIDGE_A = _PY_A
cdef double BRIDGE_B = _PY_B


cdef inline double _h_val(double t) nogil:
    cdef double a = t if t >= 0.0 else -t
    cdef double lt, q, st, x, p0, p1, chi
    if a >= 3.0:
        lt = log(a)
        return 1.0 / (a * lt * lt)
    q = BRIDGE_A * a * a + BRIDGE_B * a * a * a * a
    if a <= 2.0:
        return exp(-q)
    x = a - 2.0
    p0 = exp(-1.0 / x)
    p1 = exp(-1.0 / (1.0 - x))
    chi = p0 / (p0 + p1)
    lt = log(a)
    st = lt + 2.0 * log(lt)
    return exp(-((1.0 - chi) * q + chi * st))


def orbit_scan(int kind, double p1, double p2, double[::1] grid, int n_max):
    """Incremental max/min scan of cumulative log-derivatives; see fallback."""
    cdef Py_ssize_t m = grid.shape[0]
    a_fwd = np.empty(n_max)
    a_bwd = np.empty(n_max)
    cdef double[::1] af = a_fwd
    cdef double[::1] ab = a_bwd
    x_arr = np.array(grid, dtype=np.float64)
    s_arr = np.zeros(m)
    cdef double[::1] x = x_arr
    cdef double[::1] s = s_arr
    cdef Py_ssize_t i, n
    cdef int p
    cdef double lam, c, xe, d, smax, smin, xi, w
    with nogil:
        for n in range(n_max):
            smax = -1e300
            smin = 1e300
            if kind == 0:
                smax = 0.0
                smin = 0.0
            elif kind == 1:
                lam = p1
                for i in range(m):
                    xi = x[i]
                    w = 1.0 + (lam - 1.0) * xi
                    d = lam / (w * w)
                    s[i] += log(d)
                    xi = lam * xi / w
                    if xi < 0.0:
                        xi = 0.0
                    elif xi > 1.0:
                        xi = 1.0
                    x[i] = xi
                    if s[i] > smax:
                        smax = s[i]
                    if s[i] < smin:
                        smin = s[i]
            else:
                c = p1
                p = <int> p2
                for i in range(m):
                    xi = x[i]
                    xe = xi * (1.0 - xi)
                    d = 1.0 + c * (p + 1) * _ipow(xe, p) * (1.0 - 2.0 * xi)
                    s[i] += log(d)
                    xi = xi + c * _ipow(xe, p + 1)
                    if xi < 0.0:
                        xi = 0.0
                    elif xi > 1.0:
                        xi = 1.0
                    x[i] = xi
                    if s[i] > smax:
                        smax = s[i]
                    if s[i] < smin:
                        smin = s[i]
            af[n] = smax
            ab[n] = -smin
    return a_fwd, a_bwd


cdef inline double _ipow(double base, int n) nogil:
    cdef double out = 1.0
    cdef int k
    for k in range(n):
        out *= base
    return out


def hump_series_sum(t, double[::1] weight, double[::1] scale, double[::1] center):
    """sum_k weight[k] * h(scale[k] * (t - center[k])) with Kahan accumulation."""
    t_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=np.float64)))
    out_arr = np.empty(t_arr.shape[0])
    cdef double[::1] tv = t_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n = tv.shape[0]
    cdef Py_ssize_t k_count = weight.shape[0]
    cdef Py_ssize_t i, k
    cdef double acc, comp, term, y, tmp, tt
    with nogil:
        for i in range(n):
            acc = 0.0
            comp = 0.0
            tt = tv[i]
            for k in range(k_count):
                term = weight[k] * _h_val(scale[k] * (tt - center[k]))
                y = term - comp
                tmp = acc + y
                comp = (tmp - acc) - y
                acc = tmp
            out[i] = acc
    return out_arr
