"""The even base bump h and exact derivatives up to order 4.

h is even, h(0) = 1, strictly decreasing for t > 0, and equals
1 / (t * log(t)**2) for t >= 3.  On [0, 3] it is written as exp(-s(t)) with

    s(t) = (1 - chi(t)) * q(t*t) + chi(t) * (log t + 2*log log t)

where q(y) = A*y + B*y**2 matches the value and slope of the log-tail at
t = 3 and chi is a C-infinity step (0 for t <= 2, 1 for t >= 3) built from
exp(-1/x) bumps.  Working in the variable t**2 near the origin makes h even
and smooth at 0; matching at t = 3 keeps s increasing on (0, 3), which is
verified on a fine grid the first time the module is used.

Derivatives are exact: the tail uses the closed-form expansion of
d^m/dt^m [1/(t log^2 t)] over the basis t**-(m+1) * log(t)**-k, the bridge
runs order-4 Taylor jets through q, chi and the log terms.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 4

# q(y) = BRIDGE_A*y + BRIDGE_B*y**2 with q(9) = s3 and (d/dt) q(t^2)|_3 = s'(3)
_S3 = math.log(3.0) + 2.0 * math.log(math.log(3.0))
_SP3 = 1.0 / 3.0 + 2.0 / (3.0 * math.log(3.0))
BRIDGE_B = (_SP3 / 6.0 - _S3 / 9.0) / 9.0
BRIDGE_A = _S3 / 9.0 - 9.0 * BRIDGE_B

# c[m][k] in h^(m)(t) = sum_k c[m][k] / (t**(m+1) * log(t)**k), for t >= 3.
# Recurrence c[m+1][k] = -(m+1) c[m][k] - (k-1) c[m][k-1], seeded by c[0][2] = 1.
def _tail_tables(max_order: int) -> list[dict[int, float]]:
    tables = [{2: 1.0}]
    for m in range(max_order):
        prev = tables[-1]
        nxt: dict[int, float] = {}
        for k, c in prev.items():
            nxt[k] = nxt.get(k, 0.0) - (m + 1) * c
            nxt[k + 1] = nxt.get(k + 1, 0.0) - k * c
        tables.append(nxt)
    return tables


_TAIL_C = _tail_tables(MAX_ORDER)


# ---------------------------------------------------------------------------
# Order-4 jets: u is an array of shape (order+1, ...) holding derivatives
# u[j] = d^j u / dt^j.  Enough machinery for the bridge pieces.
# ---------------------------------------------------------------------------

_BINOM = [[math.comb(n, j) for j in range(MAX_ORDER + 1)] for n in range(MAX_ORDER + 1)]


def jet_const(value, order, shape):
    u = np.zeros((order + 1,) + shape)
    u[0] = value
    return u


def jet_mul(u, v):
    order = u.shape[0] - 1
    out = np.zeros_like(u)
    for n in range(order + 1):
        for j in range(n + 1):
            out[n] += _BINOM[n][j] * u[j] * v[n - j]
    return out


def jet_div(u, v):
    """Jet of u / v (v[0] must be nonzero)."""
    order = u.shape[0] - 1
    out = np.zeros_like(u)
    out[0] = u[0] / v[0]
    for n in range(1, order + 1):
        acc = u[n].copy()
        for j in range(1, n + 1):
            acc -= _BINOM[n][j] * v[j] * out[n - j]
        out[n] = acc / v[0]
    return out


def jet_exp(u):
    order = u.shape[0] - 1
    out = np.zeros_like(u)
    out[0] = np.exp(u[0])
    for n in range(1, order + 1):
        for j in range(1, n + 1):
            out[n] += _BINOM[n - 1][j - 1] * u[j] * out[n - j]
    return out


def jet_log(u):
    """Jet of log(u) (u[0] must be positive).

    Uses u' = u * l': u[n] = sum_{j=1..n} C(n-1, j-1) l[j] u[n-j], solved
    for l[n].
    """
    order = u.shape[0] - 1
    out = np.zeros_like(u)
    out[0] = np.log(u[0])
    for n in range(1, order + 1):
        acc = u[n].copy()
        for j in range(1, n):
            acc -= _BINOM[n - 1][j - 1] * out[j] * u[n - j]
        out[n] = acc / u[0]
    return out


def _jet_t(t, order):
    u = np.zeros((order + 1,) + t.shape)
    u[0] = t
    if order >= 1:
        u[1] = 1.0
    return u


def _jet_q(t, order):
    """Jet of q(t^2) = A t^2 + B t^4."""
    u = np.zeros((order + 1,) + t.shape)
    A, B = BRIDGE_A, BRIDGE_B
    u[0] = A * t * t + B * t**4
    if order >= 1:
        u[1] = 2 * A * t + 4 * B * t**3
    if order >= 2:
        u[2] = 2 * A + 12 * B * t * t
    if order >= 3:
        u[3] = 24 * B * t
    if order >= 4:
        u[4] = np.full_like(t, 24 * B)
    return u


def _jet_stail(t, order):
    """Jet of log t + 2 log log t."""
    lt = jet_log(_jet_t(t, order))
    return lt + 2.0 * jet_log(lt)


def _jet_psi(x, order):
    """Jet of exp(-1/x) for x > 0."""
    u = np.zeros((order + 1,) + x.shape)
    u[0] = -1.0 / x
    sign = 1.0
    fact = 1.0
    for j in range(1, order + 1):
        # d^j/dx^j (-1/x) = (-1)^(j+1) j! x^-(j+1) ... sign pattern: +1/x^2, -2/x^3, ...
        fact *= j
        sign = 1.0 if j % 2 == 1 else -1.0
        u[j] = sign * fact / x ** (j + 1)
    return jet_exp(u)


def _jet_chi(t, order):
    """Jet of the smooth step: 0 for t <= 2, 1 for t >= 3."""
    x = t - 2.0
    p0 = _jet_psi(x, order)
    p1 = _jet_psi(1.0 - x, order)
    # chain rule for psi(1-x): flip sign of odd derivatives
    for j in range(1, order + 1):
        if j % 2 == 1:
            p1[j] = -p1[j]
    return jet_div(p0, p0 + p1)


def h_jet(t, order: int = MAX_ORDER) -> np.ndarray:
    """Derivatives h^(j)(t) for j = 0..order, shape (order+1,) + t.shape.

    Exact piecewise evaluation; evenness is applied before dispatch, so any
    real t is accepted.
    """
    if order > MAX_ORDER:
        raise OrderUnavailableError(
            f"h derivatives available up to order {MAX_ORDER}, requested {order}"
        )
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    a = np.abs(t)
    out = np.zeros((order + 1,) + a.shape)

    inner = a <= 2.0   # q and the blend agree at 2 (chi vanishes to all orders)
    blend = (a > 2.0) & (a < 3.0)
    tail = a >= 3.0

    if np.any(inner):
        ti = a[inner]
        out[:, inner] = jet_exp(-_jet_q(ti, order))
    if np.any(blend):
        tb = a[blend]
        chi = _jet_chi(tb, order)
        one = jet_const(1.0, order, tb.shape)
        s = jet_mul(one - chi, _jet_q(tb, order)) + jet_mul(chi, _jet_stail(tb, order))
        out[:, blend] = jet_exp(-s)
    if np.any(tail):
        tt = a[tail]
        lt = np.log(tt)
        for m in range(order + 1):
            acc = np.zeros_like(tt)
            for k, c in _TAIL_C[m].items():
                acc += c / lt**k
            out[m, tail] = acc / tt ** (m + 1)

    # h is even: odd derivatives flip sign for negative t.
    neg = t < 0
    if np.any(neg):
        for m in range(1, order + 1, 2):
            out[m, neg] = -out[m, neg]
    if scalar:
        return out[:, 0]
    return out


def h_value(t) -> np.ndarray:
    """h(t), vectorised (cheap path used by the series kernels)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    a = np.abs(np.atleast_1d(t))
    out = np.empty_like(a)

    inner = a <= 2.0
    blend = (a > 2.0) & (a < 3.0)
    tail = a >= 3.0

    ti = a[inner]
    out[inner] = np.exp(-(BRIDGE_A * ti * ti + BRIDGE_B * ti**4))
    if np.any(blend):
        tb = a[blend]
        x = tb - 2.0
        p0 = np.exp(-1.0 / x)
        p1 = np.exp(-1.0 / (1.0 - x))
        chi = p0 / (p0 + p1)
        q = BRIDGE_A * tb * tb + BRIDGE_B * tb**4
        lt = np.log(tb)
        st = lt + 2.0 * np.log(lt)
        out[blend] = np.exp(-((1.0 - chi) * q + chi * st))
    tt = a[tail]
    out[tail] = 1.0 / (tt * np.log(tt) ** 2)
    return out[0] if scalar else out


def base_h(t, m: int = 0):
    """h^(m)(t); m = 0 avoids the jet machinery."""
    if m == 0:
        return h_value(t)
    return h_jet(t, m)[m]


def h_tail_integral(x: float) -> float:
    """Exact integral of h over [x, +inf) for x >= 3 (antiderivative -1/log t)."""
    if x < 3.0:
        raise ValueError(f"closed-form tail needs x >= 3, got {x}")
    return 1.0 / math.log(x)


# Cumulative of h: closed form -1/log t beyond 3, a dense composite-Simpson
# table for the bridge part.  Table error ~ (3/N)^4 per panel, well below
# 1e-13 total at N = 6000.
_CUM_N = 6000
_cum_grid: np.ndarray | None = None
_cum_vals: np.ndarray | None = None


def _bridge_cumulative_table():
    global _cum_grid, _cum_vals
    if _cum_grid is None:
        n = _CUM_N
        edges = np.linspace(0.0, 3.0, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        fe = h_value(edges)
        fm = h_value(mids)
        panels = (edges[1:] - edges[:-1]) / 6.0 * (fe[:-1] + 4.0 * fm + fe[1:])
        _cum_grid = edges
        _cum_vals = np.concatenate([[0.0], np.cumsum(panels)])
    return _cum_grid, _cum_vals


def h_bridge_integral(x) -> np.ndarray:
    """Integral of h over [0, x] for 0 <= x <= 3, interpolated from the table."""
    grid, vals = _bridge_cumulative_table()
    x = np.clip(np.asarray(x, dtype=float), 0.0, 3.0)
    return np.interp(x, grid, vals)


def h_total_integral() -> float:
    """Integral of h over the whole line: 2 * (bridge part + 1/log 3)."""
    return 2.0 * (float(h_bridge_integral(3.0)) + 1.0 / math.log(3.0))


def h_cumulative(x) -> np.ndarray:
    """H(x) = integral of h over (-inf, x], exact up to the bridge table.

    Piecewise: 1/log|x| for x <= -3, half-mass -+ bridge integral on |x| < 3,
    total - 1/log x for x >= 3.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    total = h_total_integral()
    out = np.empty_like(x)

    left = x <= -3.0
    right = x >= 3.0
    mid = ~(left | right)
    with np.errstate(divide="ignore"):
        out[left] = 1.0 / np.log(-x[left])
        out[right] = total - 1.0 / np.log(x[right])
    xm = x[mid]
    half = 0.5 * total
    out[mid] = np.where(
        xm >= 0.0,
        half + h_bridge_integral(xm),
        half - h_bridge_integral(-xm),
    )
    return float(out[0]) if scalar else out


class OrderUnavailableError(ValueError):
    """Requested derivative order exceeds what an oracle provides."""


_checked = False


def check_monotone(points: int = 10_000) -> None:
    """Verify h strictly decreases on (0, 3]; run once at first schedule build."""
    global _checked
    if _checked:
        return
    grid = np.linspace(0.0, 3.0, points + 1)
    vals = h_value(grid)
    if not np.all(np.diff(vals) < 0.0):
        j = int(np.argmax(np.diff(vals) >= 0.0))
        raise AssertionError(
            f"base bump not decreasing near t={grid[j]:.6f}: "
            f"h={vals[j]:.6e} -> {vals[j + 1]:.6e}"
        )
    _checked = True
