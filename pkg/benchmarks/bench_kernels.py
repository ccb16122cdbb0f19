#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs the two hot loops on representative workloads and prints a timing
table plus the maximum relative deviation between backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from growthlab import GridSpec, build_delta
from growthlab import _kernels_py

try:
    from growthlab import _fast
except ImportError:
    _fast = None


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _fast is None:
        print("compiled extension unavailable; build it with 'pip install -e .'")

    rows = []

    grid = GridSpec(uniform=4096).points()
    workloads = [
        ("orbit scan, mobius lam=2, n=2000", lambda mod: mod.orbit_scan(1, 2.0, 0.0, grid, 2000)),
        ("orbit scan, poly p=1 c=0.1, n=5000", lambda mod: mod.orbit_scan(2, 0.1, 1.0, grid, 5000)),
    ]

    d = build_delta("n", 2, 1e-10)
    ts = np.linspace(-4.0e4, 4.0e4, 50001)
    workloads.append(
        (
            f"series sum, {len(d.indices)} humps x {len(ts)} points",
            lambda mod: mod.hump_series_sum(ts, d.phi, d.scale, d.center),
        )
    )

    for name, call in workloads:
        t_py, out_py = _time(lambda: call(_kernels_py), args.repeat)
        if _fast is not None:
            t_c, out_c = _time(lambda: call(_fast), args.repeat)
            a = np.concatenate([np.atleast_1d(np.asarray(o)).ravel() for o in np.atleast_1d(out_py)])
            b = np.concatenate([np.atleast_1d(np.asarray(o)).ravel() for o in np.atleast_1d(out_c)])
            dev = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
            rows.append((name, t_py, t_c, t_py / t_c, dev))
        else:
            rows.append((name, t_py, float("nan"), float("nan"), 0.0))

    print(f"{'workload':<44} {'numpy':>9} {'compiled':>9} {'speedup':>8} {'max rel dev':>12}")
    for name, t_py, t_c, speedup, dev in rows:
        print(f"{name:<44} {t_py:>8.3f}s {t_c:>8.3f}s {speedup:>7.1f}x {dev:>12.2e}")


if __name__ == "__main__":
    main()
