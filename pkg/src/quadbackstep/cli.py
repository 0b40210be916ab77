"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(thrust singularity or blow-up), 4 failed Lyapunov verification.
"""
import argparse
import csv
import logging
import os
import sys
from dataclasses import replace

from .analysis import compare, compute_metrics, verify_lyapunov
from .backstepping import Gains
from .errors import ConfigError
from .scenario import load_scenario, wind_scenario, save_scenario
from .simulation import run_scenario
from .trace import SimTrace

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4
log = logging.getLogger("quadbackstep")


def _common(p):
    p.add_argument("--scenario", help="scenario YAML file (default: wind-step spiral scenario)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--csv", action="store_true", help="write trace/metrics CSV files")
    p.add_argument("--svg", action="store_true", help="write SVG plots")
    p.add_argument("--h", type=float, help="integration step (s)")
    p.add_argument("--horizon", type=float, help="simulated time (s)")
    for i in range(1, 9):
        p.add_argument(f"--c{i}", type=float, help=f"backstepping gain c{i}")
    p.add_argument("--quiet", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="quadbackstep",
                                     description="Quadrotor backstepping vs PID simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario")
    _common(p)
    p.add_argument("--controller", choices=("backstepping", "pid"))

    p = sub.add_parser("compare", help="run backstepping and PID on the same scenario")
    _common(p)

    p = sub.add_parser("verify-lyapunov", help="check the Lyapunov identities on a trace")
    _common(p)
    p.add_argument("--trace", help="existing trace CSV instead of simulating")

    p = sub.add_parser("plot", help="render SVG plots from trace CSVs")
    p.add_argument("--trace", action="append", required=True, help="trace CSV (repeatable)")
    p.add_argument("--out", default=".")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("scenario-init", help="write the default wind-step scenario file")
    p.add_argument("--out", default="scenario.yaml", help="destination path")
    p.add_argument("--quiet", action="store_true")
    return parser


def _config(args, controller=None):
    cfg = load_scenario(args.scenario) if args.scenario else wind_scenario()
    changes = {}
    if controller:
        changes["controller"] = controller
    if args.h is not None:
        changes["h"] = args.h
    if args.horizon is not None:
        changes["horizon"] = args.horizon
    overrides = {f"c{i}": getattr(args, f"c{i}") for i in range(1, 9)
                 if getattr(args, f"c{i}") is not None}
    if overrides:
        changes["gains"] = replace(cfg.gains, **overrides)
    return replace(cfg, **changes) if changes else cfg


def _write_metrics(metrics, path, label=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["channel", "rmse", "rmse_post", "peak", "settling", "steady_state"])
        for ch, row in metrics.rows():
            w.writerow([ch] + ["" if v is None else repr(v) for v in row.values()])


def _print_metrics(metrics, title):
    print(f"== {title}")
    print(f"{'channel':10s} {'rmse':>10s} {'rmse_post':>10s} {'peak':>10s} "
          f"{'settling':>12s} {'steady':>10s}")
    for ch, row in metrics.rows():
        st = "not settled" if row["settling"] is None else f"{row['settling']:.3f}"
        print(f"{ch:10s} {row['rmse']:10.4g} {row['rmse_post']:10.4g} {row['peak']:10.4g} "
              f"{st:>12s} {row['steady_state']:10.4g}")


def _report_status(trace, quiet):
    if trace.terminated:
        print(f"run terminated: {trace.status} at t = {trace.meta['fail_time']}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_run(args):
    cfg = _config(args, args.controller)
    if cfg.position_loop.enabled:
        log.info("x/y tracked by the PD position loop (outside the backstepping design)")
    trace = run_scenario(cfg)
    os.makedirs(args.out, exist_ok=True)
    if args.csv:
        trace.to_csv(os.path.join(args.out, "trace.csv"))
    code = _report_status(trace, args.quiet)
    if len(trace) > 1:
        metrics = compute_metrics(trace)
        if args.csv:
            _write_metrics(metrics, os.path.join(args.out, "metrics.csv"))
        if not args.quiet:
            _print_metrics(metrics, f"{cfg.controller} ({trace.status})")
        if args.svg:
            from .plotting import emit_plots
            emit_plots([trace], args.out)
    return code


def cmd_compare(args):
    base = _config(args)
    result = compare(replace(base, controller="backstepping"), replace(base, controller="pid"),
                     concurrent=True)
    os.makedirs(args.out, exist_ok=True)
    if args.csv:
        result.to_csv(os.path.join(args.out, "comparison.csv"))
        for tr in result.traces:
            tr.to_csv(os.path.join(args.out, f"trace_{tr.controller}.csv"))
    if args.svg:
        from .plotting import emit_plots
        emit_plots(list(result.traces), args.out)
    if not args.quiet:
        print(result.to_text())
    codes = [_report_status(tr, args.quiet) for tr in result.traces]
    return max(codes)


def cmd_verify(args):
    if args.trace:
        trace = SimTrace.from_csv(args.trace)
    else:
        trace = run_scenario(_config(args, "backstepping"))
        if trace.terminated:
            return _report_status(trace, args.quiet)
    overrides = {f"c{i}": getattr(args, f"c{i}") for i in range(1, 9)
                 if getattr(args, f"c{i}") is not None}
    gains = None
    if overrides:
        base = trace.meta.get("scenario", {}).get("controller", {}).get("backstepping", {})
        gains = Gains(**{**base, **overrides})
    report = verify_lyapunov(trace, gains)
    if not args.quiet:
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_plot(args):
    from .plotting import emit_plots
    traces = [SimTrace.from_csv(p) for p in args.trace]
    paths = emit_plots(traces, args.out)
    if not args.quiet:
        for p in paths.values():
            print(p)
    return EXIT_OK


def cmd_init(args):
    save_scenario(wind_scenario(), args.out)
    if not args.quiet:
        print(f"wrote {args.out}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "verify-lyapunov": cmd_verify,
            "plot": cmd_plot, "scenario-init": cmd_init}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
