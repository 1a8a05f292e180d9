"""Command line: monitor, bands, simulate, plan."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bounds import EpsilonSpec, Method, cdf_band, quantile_band
from .empirical import ArmSample
from .errors import SeqCanaryError, EmptySample
from .ingest import TestSnapshot, load_snapshot, read_events, save_snapshot
from .simulation import RNG_NAME, TESTS, StudyConfig, run_study
from .testing import Hypothesis, TestConfig, Verdict, fixed_sample_size, sequential_max_n
from .twosample import (
    PooledSample,
    RunningIntersection,
    abs_diff_band,
    band_extremes,
    diff_band,
    supnorm_interval,
    update_running,
)

EXIT_ACCEPT, EXIT_ERROR, EXIT_REJECT, EXIT_UNDECIDED = 0, 1, 2, 3


def sig6(x):
    """Six significant digits; infinities are rendered as absent."""
    if x is None:
        return None
    if isinstance(x, (bool, int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def _csv_num(x) -> str:
    v = sig6(x)
    return "" if v is None else f"{v:.6g}" if isinstance(v, float) else str(v)


def _open_in(path):
    if path in (None, "-"):
        return sys.stdin
    return open(path)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", newline="")


def _spec_from_args(args) -> EpsilonSpec:
    return EpsilonSpec(Method(args.epsilon), args.alpha, args.n_star)


# -- monitor -----------------------------------------------------------------

def cmd_monitor(args) -> int:
    if args.resume:
        snap = load_snapshot(args.resume)
    else:
        config = TestConfig(Hypothesis(args.hypothesis), args.alpha, args.tau, Method(args.epsilon), args.n_star)
        snap = TestSnapshot(config, mode=args.mode, cadence=args.cadence,
                            out_of_order=args.out_of_order, tie_epsilon=args.tie_epsilon)
    out = _open_out(args.out)
    src = _open_in(args.infile)

    def emit(rec):
        if rec is None:
            return
        row = {k: sig6(v) if k != "decision" else v for k, v in rec.as_dict().items()}
        if args.wall_clock:
            row["wall"] = time.time()
        out.write(json.dumps(row) + "\n")

    try:
        for event in read_events(src, snap.mode):
            emit(snap.apply(event))
        emit(snap.flush())
    finally:
        if src is not sys.stdin:
            src.close()
    if args.snapshot:
        save_snapshot(snap, args.snapshot)
    if out is not sys.stdout:
        out.close()

    st = snap.state
    summary = {"decision": st.decision.value, "q": sig6(st.q), "n_a": snap.samples["a"].n,
               "n_b": snap.samples["b"].n, "events": snap.accepted, "ignored": snap.ignored,
               "diagnostics": snap.diagnostics + st.diagnostics}
    if snap.mode == "count":
        summary["gaps"] = {"a": snap.samples["a"].n, "b": snap.samples["b"].n}
    print(json.dumps(summary), file=sys.stderr)
    if st.decision is Verdict.ACCEPT_APPROX_NULL:
        return EXIT_ACCEPT
    if st.decision is Verdict.REJECT_NULL:
        return EXIT_REJECT
    return EXIT_UNDECIDED


# -- bands -------------------------------------------------------------------

BAND_COLUMNS = ["kind", "grid", "lower", "upper", "alpha", "n_a", "n_b"]


def _collect(args):
    """Replay events, returning the arm samples and the running sup-norm interval."""
    if args.resume:
        snap = load_snapshot(args.resume)
        return snap.samples["a"], snap.samples["b"], [], snap.state.norm_cs
    spec = _spec_from_args(args)
    samples = {"a": ArmSample(), "b": ArmSample()}
    pooled = PooledSample()
    last_ts = {"a": None, "b": None}
    running = RunningIntersection()
    trail = []
    src = _open_in(args.infile)
    try:
        for i, e in enumerate(read_events(src, args.mode), start=1):
            if args.mode == "measurement":
                x = e.value
            else:
                prev, last_ts[e.arm] = last_ts[e.arm], e.ts
                if prev is None:
                    continue
                x = e.ts - prev
                if x <= 0:
                    raise SeqCanaryError(f"line {i}: count-mode timestamps must increase per arm")
            samples[e.arm].add(x)
            pooled.add(e.arm, x)
            if spec.method.sequential and i % args.cadence == 0 and min(pooled.n_a, pooled.n_b) >= spec.n_min:
                iv = supnorm_interval(band_extremes(samples["a"], samples["b"], spec, pooled))
                running = update_running(running, iv)
                trail.append((e.ts, running.current))
    finally:
        if src is not sys.stdin:
            src.close()
    return samples["a"], samples["b"], trail, running


def band_rows(a: ArmSample, b: ArmSample, spec: EpsilonSpec, trail=()):
    """Rows for every band type: per-arm CDF and quantile bands at alpha/2,
    the difference and absolute-difference bands at alpha, and the sup-norm
    interval (running intersection for time-uniform methods)."""
    if a.n == 0 or b.n == 0:
        raise EmptySample("bands need observations in both arms")
    half = spec.with_alpha(spec.alpha / 2)
    n_a, n_b = a.n, b.n
    rows = []
    band = diff_band(a, b, spec)
    grid = band.grid[1:]
    for kind, curve in (("cdf_a", cdf_band(a, half, grid)), ("cdf_b", cdf_band(b, half, grid)),
                        ("quantile_a", quantile_band(a, half)), ("quantile_b", quantile_band(b, half))):
        rows += [(kind, g, lo, hi, half.alpha, n_a, n_b) for g, lo, hi in zip(curve.grid, curve.lower, curve.upper)]
    rows += [("diff", g, lo, hi, spec.alpha, n_a, n_b) for g, lo, hi in zip(band.grid, band.lower, band.upper)]
    ab = abs_diff_band(band)
    rows += [("abs_diff", g, lo, hi, spec.alpha, n_a, n_b) for g, lo, hi in zip(ab.grid, ab.lower, ab.upper)]
    if trail:
        rows += [("supnorm_running", t, iv.lo, iv.hi, spec.alpha, n_a, n_b) for t, iv in trail]
    else:
        iv = supnorm_interval(band)
        rows.append(("supnorm", None, iv.lo, iv.hi, spec.alpha, n_a, n_b))
    return rows


def write_band_csv(rows, fh) -> None:
    w = csv.writer(fh)
    w.writerow(BAND_COLUMNS)
    for kind, g, lo, hi, alpha, n_a, n_b in rows:
        w.writerow([kind, _csv_num(g), _csv_num(lo), _csv_num(hi), _csv_num(alpha), n_a, n_b])


def cmd_bands(args) -> int:
    a, b, trail, _ = _collect(args)
    rows = band_rows(a, b, _spec_from_args(args), trail)
    out = _open_out(args.out)
    write_band_csv(rows, out)
    if out is not sys.stdout:
        out.close()
    return 0


# -- simulate ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = StudyConfig(runs=args.runs, cap=args.cap, alpha=args.alpha, shape=args.shape,
                      rate_a=args.rate_a, rate_b_alt=args.rate_b, seed=args.seed,
                      method=Method(args.epsilon))
    if not cfg.method.sequential:
        raise SeqCanaryError("simulate needs a time-uniform epsilon method")
    scenarios = ("null", "alt") if args.scenario == "both" else (args.scenario,)
    results = run_study(cfg, scenarios)
    print(f"# rng: {RNG_NAME} seed={cfg.seed}")
    print(f"# runs={cfg.runs} cap={cfg.cap} alpha={sig6(cfg.alpha)} shape={sig6(cfg.shape)} "
          f"rate_a={sig6(cfg.rate_a)} epsilon={cfg.method.value}")
    print("scenario\trate_b\ttest\trejections\truns\tmedian_stop")
    for name, res in results.items():
        for test in TESTS:
            med = res.median_stop(test)
            med_s = "no stop by cap" if math.isinf(med) else f"{sig6(med):.6g}"
            print(f"{name}\t{sig6(res.rate_b):.6g}\t{test}\t{res.rejections(test)}\t{res.runs}\t{med_s}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scenario", "test", "run", "stop_n"])
            for name, res in results.items():
                for test in TESTS:
                    for i, stop in enumerate(res.stops[test]):
                        w.writerow([name, test, i, "" if stop is None else stop])
    return 0


# -- plan --------------------------------------------------------------------

def cmd_plan(args) -> int:
    if args.r is None and args.tau is None:
        raise SeqCanaryError("plan needs --r or --tau")
    r = args.r if args.r is not None else args.tau / 2
    if not r > 0:
        raise SeqCanaryError("band radius must be positive")
    print(f"alpha\t{sig6(args.alpha):.6g}")
    print(f"radius\t{sig6(r):.6g}")
    print(f"fixed_n_per_arm\t{fixed_sample_size(args.alpha, r)}")
    method = Method(args.epsilon)
    if method.sequential:
        spec = EpsilonSpec(method, args.alpha, args.n_star)
        print(f"sequential_max_n_per_arm[{method.value}]\t{sequential_max_n(spec, r)}")
    return 0


# -- entry point ---------------------------------------------------------------

def _common(p, epsilon_default="howard"):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--epsilon", choices=[m.value for m in Method], default=epsilon_default)
    p.add_argument("--n-star", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqcanary", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="monitor an event stream and emit decision records")
    _common(p)
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--hypothesis", choices=[h.value for h in Hypothesis], default="eq")
    p.add_argument("--mode", choices=["measurement", "count"], default="measurement")
    p.add_argument("--cadence", type=int, default=1)
    p.add_argument("--out-of-order", choices=["reject", "sort"], default="reject")
    p.add_argument("--tie-epsilon", type=float, default=1e-9)
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--snapshot", help="write a snapshot here when the input ends")
    p.add_argument("--resume", help="resume from a snapshot")
    p.add_argument("--wall-clock", action="store_true", help="add a wall-clock stamp to each record")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("bands", help="export band curves as CSV")
    _common(p)
    p.add_argument("--mode", choices=["measurement", "count"], default="measurement")
    p.add_argument("--cadence", type=int, default=1)
    p.add_argument("--in", dest="infile", default="-")
    p.add_argument("--resume", help="read samples from a snapshot instead of events")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("simulate", help="continuous-monitoring study against KS and Mann-Whitney")
    _common(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--cap", type=int, default=5000)
    p.add_argument("--seed", type=int, default=2023)
    p.add_argument("--scenario", choices=["null", "alt", "both"], default="both")
    p.add_argument("--shape", type=float, default=10.0)
    p.add_argument("--rate-a", type=float, default=10.0)
    p.add_argument("--rate-b", type=float, default=11.0, help="arm B rate in the alternative scenario")
    p.add_argument("--out", help="CSV of per-run stopping times")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="fixed-n sample size and sequential maximum n")
    _common(p)
    p.add_argument("--r", type=float, help="difference-band radius")
    p.add_argument("--tau", type=float, help="tolerance; uses r = tau / 2")
    p.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses status 2 for usage errors, which would read as "reject"
        return EXIT_ERROR if exc.code else 0
    try:
        if hasattr(args, "cadence") and args.cadence < 1:
            raise SeqCanaryError("--cadence must be >= 1")
        if hasattr(args, "runs") and (args.runs < 1 or args.cap < 1):
            raise SeqCanaryError("--runs and --cap must be >= 1")
        EpsilonSpec(Method(args.epsilon), args.alpha, args.n_star)
        return args.func(args)
    except (SeqCanaryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
