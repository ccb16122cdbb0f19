"""Command-line front end.

Subcommands: growth, gamma, gap-check, classify, denjoy, delta build,
delta verify, flat-flow growth, ball, fit.  Options may be preloaded from a
plain key=value config file (--config), with explicit flags winning.

Exit codes: 0 all checks passed, 1 at least one verified inequality failed,
2 usage error.  CSV output carries full double precision (17 significant
digits); JSON reports embed the slack used by each pass/fail decision.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from ._threads import thread_map
from .ball import build_radial, middle_third, radial_growth
from .deltafn import (
    build_delta,
    delta_to_dict,
    flatness_diagnostic,
    g_sequence,
    load_delta,
    save_delta,
    verify_integrability,
    verify_ratio_bound,
)
from .diffeo import GrowthLabError, PreconditionError, parse_map_spec
from .flow import build_flow, flow_growth, orbit_growth_crosscheck, verify_theorem_1_8
from .gap import certify_gap, denjoy_check, growth_lemma_classify, RealSequence, regularity_constants
from .growth import GridSpec, gamma_exponent, growth_sequence, orbit_gap_bound

FLOAT_FMT = "%.17g"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class CheckFailure(GrowthLabError):
    """A verified inequality failed; maps to exit code 1."""


@dataclass
class ExperimentConfig:
    map_spec: str = "identity"
    n_max: int = 100
    grid_uniform: int = 2048
    grid_ladder: int = 60
    out: str | None = None
    seed: int = 0
    checks: str = ""

    def grid(self) -> GridSpec:
        return GridSpec(uniform=self.grid_uniform, ladder_count=self.grid_ladder)


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _write_csv(path, header, rows):
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) if isinstance(c, float) else c for c in row])
    finally:
        if path:
            out.close()


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, val = line.partition("=")
            if not eq:
                raise PreconditionError(f"config line without '=': {line!r}")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def cmd_growth(args) -> int:
    f = parse_map_spec(args.map)
    grid = GridSpec(uniform=args.grid_uniform, ladder_count=args.grid_ladder)
    records = growth_sequence(f, args.n_max, grid)
    _write_csv(
        args.out,
        ["n", "a_fwd", "a_bwd", "gamma_n"],
        [(r.n, float(r.a_fwd), float(r.a_bwd), float(r.gamma_n)) for r in records],
    )
    status = EXIT_OK
    if args.x0 is not None:
        report = orbit_gap_bound(f, args.x0, args.n_max, grid)
        if not report.ok:
            print(
                f"gap bound violations at n = {report.violations}", file=sys.stderr
            )
            status = EXIT_CHECK_FAILED
    return status


def cmd_gamma(args) -> int:
    f = parse_map_spec(args.map)
    est = gamma_exponent(f, args.n_probe, GridSpec(uniform=args.grid_uniform))
    _write_json(
        args.out,
        {
            "gamma": est.value,
            "probes": [{"n": n, "estimate": v} for n, v in est.probes],
            "fixed_point_value": est.fixed_point_value,
            "tolerance": est.tolerance,
            "flagged": est.flagged,
        },
    )
    return EXIT_CHECK_FAILED if est.flagged else EXIT_OK


def cmd_gap_check(args) -> int:
    f = parse_map_spec(args.map)
    cert = certify_gap(f, args.n_max, GridSpec(uniform=args.grid_uniform))
    _write_json(args.out, cert.to_dict())
    bad = bool(cert.bound_violations) or any(cert.convexity_violations.values())
    return EXIT_CHECK_FAILED if bad else EXIT_OK


def cmd_classify(args) -> int:
    rows = []
    with open(args.seq) as fh:
        for row in csv.reader(fh):
            if len(row) < 2 or not _is_number(row[0]):
                continue  # blank lines and headers
            rows.append((int(float(row[0])), float(row[1])))
    rows.sort()
    if not rows:
        raise PreconditionError(f"no data rows in {args.seq}")
    ns = [n for n, _ in rows]
    vals = [v for _, v in rows]
    if ns[0] == 1:
        ns = [0] + ns
        vals = [0.0] + vals
    if ns != list(range(len(ns))):
        raise PreconditionError("sequence csv must cover contiguous n starting at 0 or 1")
    verdict = growth_lemma_classify(RealSequence(np.array(vals), args.c_const), slack=args.slack)
    _write_json(
        args.out,
        {
            "verdict": verdict.verdict.value,
            "witness": verdict.witness,
            "slope_estimate": verdict.slope_estimate,
            "c_const": args.c_const,
            "slack": args.slack,
        },
    )
    return EXIT_OK


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def cmd_denjoy(args) -> int:
    f = parse_map_spec(args.map)
    if f.name == "identity":
        raise PreconditionError("identity has no disjoint interval: fJ always meets J")
    rng = np.random.default_rng(args.seed)
    reg = regularity_constants(f)

    cases = []
    attempts = 0
    while len(cases) < args.cases and attempts < 100 * args.cases:
        attempts += 1
        a = rng.uniform(0.02, 0.9)
        fa = float(f.eval(a)) - a
        if abs(fa) < 1e-12:
            continue
        width = rng.uniform(0.1, 0.9) * abs(fa)
        lo, hi = (a, a + width) if fa > 0 else (a - width, a)
        if not 0.0 <= lo < hi <= 1.0:
            continue
        n = int(rng.integers(1, args.n_cap + 1))
        # disjointness verified inside denjoy_check; pre-filter here
        flo, fhi = float(f.eval(lo)), float(f.eval(hi))
        if flo < hi and lo < fhi:
            continue
        cases.append(((lo, hi), n))

    def run(case):
        (lo, hi), n = case
        return denjoy_check(f, (lo, hi), n, variation=reg.variation, slack=args.slack)

    reports = thread_map(run, cases)
    violations = [
        {"J": list(r.interval), "n": r.n, "min": r.min_ratio, "max": r.max_ratio}
        for r in reports
        if not r.ok
    ]
    _write_json(
        args.out,
        {
            "map": args.map,
            "cases": len(reports),
            "variation": reg.variation,
            "slack": args.slack,
            "violations": violations,
        },
    )
    return EXIT_CHECK_FAILED if violations else EXIT_OK


def cmd_delta_build(args) -> int:
    d = build_delta(args.u, args.levels, args.tail_eps, args.tau_floor)
    if args.out:
        save_delta(d, args.u, args.out)
    else:
        _write_json(None, delta_to_dict(d, args.u))
    return EXIT_OK


def cmd_delta_verify(args) -> int:
    d, u, u_spec = load_delta(args.params)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = set(checks) - {"integrability", "ratio", "flatness", "g"}
    if unknown:
        raise PreconditionError(f"unknown checks: {sorted(unknown)}")
    report: dict = {"u": u_spec, "levels": d.levels, "tail_bound": d.tail_bound}
    failed = False

    if "integrability" in checks:
        rep = verify_integrability(d)
        stable = abs(
            rep.total
            - _integrability_doubled(d, rep.window)
        )
        report["integrability"] = {
            "total": rep.total,
            "window": rep.window,
            "tail": rep.tail_estimate,
            "doubling_shift": stable,
            "tolerance": 1e-6,
        }
        failed = failed or not (rep.finite and stable <= 1e-6)

    if "ratio" in checks:
        entries = []
        for i in range(1, d.levels + 1):
            rr = verify_ratio_bound(d, i)
            entries.append(
                {
                    "level": i,
                    "tau": rr.tau,
                    "target": rr.target,
                    "sup": rr.sup_ratio,
                    "witness_t": rr.witness_t,
                    "sandwich_ok": rr.lemma_sandwich_ok,
                    "ok": rr.ok,
                }
            )
            failed = failed or not rr.ok
        report["ratio"] = entries

    if "flatness" in checks:
        diag = flatness_diagnostic(d, m=1, c=0.5, t_list=(1e3, 1e4, 1e5))
        report["flatness"] = {
            "m": diag.m,
            "c": diag.c,
            "ratios": list(diag.ratios),
            "decreasing": diag.decreasing,
            "nu": diag.nu,
            "nu_violators_bounded": diag.nu_violators_bounded,
        }
        failed = failed or not diag.nu_violators_bounded

    if "g" in checks:
        ts = (1e3, 1e4, 1e5)
        g0 = [abs(g_sequence(d, 0, t) - 1.0) for t in ts]
        g1 = [abs(g_sequence(d, 1, t)) for t in ts]
        dec = all(b < a for a, b in zip(g0, g0[1:])) and all(
            b < a for a, b in zip(g1, g1[1:])
        )
        report["g"] = {"t": list(ts), "g0_minus_1": g0, "g1": g1, "decreasing": dec}
        failed = failed or not dec

    _write_json(args.out, report)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _integrability_doubled(d, T):
    from .deltafn import tail_integral
    from .quadrature import adaptive_simpson

    T2 = 2.0 * T
    breaks = np.unique(
        np.concatenate([d.center, np.geomspace(1.0, T2, 40), -np.geomspace(1.0, T2, 40)])
    )
    return adaptive_simpson(d.eval, -T2, T2, tol=1e-7, breakpoints=breaks) + tail_integral(d, T2)


def cmd_flatflow_growth(args) -> int:
    d, u, _ = load_delta(args.params)
    fm = build_flow(d)
    ns = sorted({int(n) for n in args.n.split(",") if n.strip()})
    rows = []
    failed = False
    for n in ns:
        g = flow_growth(fm, n)
        un = float(u(n))
        rows.append((n, g, un, g / un))
    # the subsequence bound is only claimed at the schedule's own shifts
    for i, tau in enumerate(d.schedule.tau, start=1):
        g = flow_growth(fm, tau)
        if g > float(u(tau)):
            failed = True
    _write_csv(args.out, ["n", "gamma_n", "u_n", "ratio"], rows)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_ball(args) -> int:
    f = parse_map_spec(args.map)
    h1d = middle_third(f) if args.rescale_middle else f
    rm = build_radial(h1d, args.dim)
    records = radial_growth(rm, args.n_max, GridSpec(uniform=args.grid_uniform))
    _write_csv(
        args.out,
        ["n", "gamma_h", "gamma_g"],
        [(r.n, r.gamma_h, r.gamma_g) for r in records],
    )
    bad = [r.n for r in records if not r.sandwich_ok]
    if bad:
        print(f"sandwich violations at n = {bad}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


@dataclass(frozen=True)
class FitReport:
    slope: float
    max_residual: float
    window: tuple[int, int]
    points: int

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "max_residual": self.max_residual,
            "window": list(self.window),
            "points": self.points,
        }


def fit_exponent(records, window: tuple[int, int]) -> FitReport:
    """Least-squares slope of log Gamma_n against log n over the window."""
    n_lo, n_hi = window
    if n_hi < 10 * n_lo:
        raise PreconditionError(f"window [{n_lo}, {n_hi}] too short: need n_hi >= 10 n_lo")
    pairs = [(r.n, r.log_gamma) for r in records if n_lo <= r.n <= n_hi]
    if len(pairs) < 10:
        raise PreconditionError(f"window holds {len(pairs)} points; need at least 10")
    ln = np.log([p[0] for p in pairs])
    lg = np.array([p[1] for p in pairs])
    slope, intercept = np.polyfit(ln, lg, 1)
    resid = np.max(np.abs(lg - (slope * ln + intercept)))
    return FitReport(float(slope), float(resid), (n_lo, n_hi), len(pairs))


def cmd_fit(args) -> int:
    with open(args.growth_csv) as fh:
        reader = csv.DictReader(fh)
        rows = [(int(r["n"]), float(r["gamma_n"])) for r in reader]
    if not rows:
        raise PreconditionError(f"no rows in {args.growth_csv}")

    class _Rec:
        def __init__(self, n, g):
            self.n = n
            self.log_gamma = math.log(g)

    lo, hi = (int(v) for v in args.window.split(","))
    rep = fit_exponent([_Rec(n, g) for n, g in rows], (lo, hi))
    _write_json(args.out, rep.to_dict())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="key=value file supplying defaults")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="growthlab",
        description="Growth sequences of interval diffeomorphisms: "
        "computation, certification, and the slow-growth construction.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("growth", help="growth sequence CSV (n,a_fwd,a_bwd,gamma_n)")
    p.add_argument("--map", required=True)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--grid-uniform", type=int, default=2048)
    p.add_argument("--grid-ladder", type=int, default=60)
    p.add_argument("--x0", type=float, default=None, help="also verify the orbit gap bound from this seed")
    _add_common(p)
    p.set_defaults(fn=cmd_growth)

    p = sub.add_parser("gamma", help="exponential growth rate with fixed-point cross-check")
    p.add_argument("--map", required=True)
    p.add_argument("--n-probe", type=int, default=256)
    p.add_argument("--grid-uniform", type=int, default=2048)
    _add_common(p)
    p.set_defaults(fn=cmd_gamma)

    p = sub.add_parser("gap-check", help="quadratic growth-gap certificate (JSON)")
    p.add_argument("--map", required=True)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--grid-uniform", type=int, default=2048)
    _add_common(p)
    p.set_defaults(fn=cmd_gap_check)

    p = sub.add_parser("classify", help="dichotomy verdict for a sequence CSV (n,a_n)")
    p.add_argument("--seq", required=True)
    p.add_argument("--c-const", type=float, required=True)
    p.add_argument("--slack", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("denjoy", help="random disjoint-interval distortion suite")
    p.add_argument("--map", required=True)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--n-cap", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slack", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(fn=cmd_denjoy)

    p = sub.add_parser("delta", help="oscillating density operations")
    dsub = p.add_subparsers(dest="delta_command", required=True)

    pb = dsub.add_parser("build", help="build a schedule + truncation, write JSON params")
    pb.add_argument("--u", required=True, help="target sequence spec, e.g. 'n' or 'power:alpha=2'")
    pb.add_argument("--levels", type=int, required=True)
    pb.add_argument("--tail-eps", type=float, default=1e-10)
    pb.add_argument("--tau-floor", type=int, default=1)
    _add_common(pb)
    pb.set_defaults(fn=cmd_delta_build)

    pv = dsub.add_parser("verify", help="run verification checks against a params file")
    pv.add_argument("--params", required=True)
    pv.add_argument("--checks", default="integrability,ratio,flatness,g")
    _add_common(pv)
    pv.set_defaults(fn=cmd_delta_verify)

    p = sub.add_parser("flat-flow", help="flow-map operations")
    fsub = p.add_subparsers(dest="flow_command", required=True)
    pg = fsub.add_parser("growth", help="CSV n,gamma_n,u_n,ratio from a params file")
    pg.add_argument("--params", required=True)
    pg.add_argument("--n", required=True, help="comma-separated n values")
    _add_common(pg)
    pg.set_defaults(fn=cmd_flatflow_growth)

    p = sub.add_parser("ball", help="radial extension growth sandwich")
    p.add_argument("--map", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--grid-uniform", type=int, default=2048)
    p.add_argument(
        "--rescale-middle",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="squeeze the map into [1/3, 2/3] before extending (default: yes)",
    )
    _add_common(p)
    p.set_defaults(fn=cmd_ball)

    p = sub.add_parser("fit", help="log-log exponent fit of a growth CSV")
    p.add_argument("--growth-csv", required=True)
    p.add_argument("--window", required=True, help="n_lo,n_hi with n_hi >= 10 n_lo")
    _add_common(p)
    p.set_defaults(fn=cmd_fit)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    tokens = list(argv) if argv is not None else sys.argv[1:]
    try:
        args = ap.parse_args(tokens)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        if getattr(args, "config", None):
            # config supplies defaults; flags present on the command line win
            cfg = _load_config(args.config)
            for key, val in cfg.items():
                flag = "--" + key.replace("_", "-")
                if flag in tokens or not hasattr(args, key):
                    continue
                cur = getattr(args, key)
                if isinstance(cur, bool):
                    setattr(args, key, val.lower() in ("1", "true", "yes"))
                elif cur is None:
                    setattr(args, key, val)
                else:
                    setattr(args, key, type(cur)(val))
        return args.fn(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except GrowthLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
