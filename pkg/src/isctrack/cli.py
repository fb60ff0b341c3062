"""Command-line interface: simulate, montecarlo, verify, export-plots.

Exit codes: 0 success, 1 runtime failure, 2 bad arguments or configuration,
3 verification failure.  ``ISCTRACK_THREADS`` caps parallel Monte Carlo
trials (default 1).
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .output import write_csv, write_metrics, write_trace
from .simkit import CONTROLLERS, run_episode, run_monte_carlo


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ISCTRACK_THREADS", "1")))
    except ValueError:
        return 1


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML configuration file")
    p.add_argument("--preset", choices=["case1", "case2", "case3"],
                   help="standard start-position preset")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="SECTION.KEY=VALUE", help="config override")
    p.add_argument("--out", default="out", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isctrack",
        description="UAV target-tracking simulator with joint "
                    "sensing/communication/control design")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one episode, write a trace CSV")
    _add_config_args(p_sim)
    p_sim.add_argument("--controller", choices=CONTROLLERS, default="iscc")
    p_sim.add_argument("--seed", type=int, default=0)

    p_mc = sub.add_parser("montecarlo",
                          help="run Monte Carlo trials, write metrics CSVs")
    _add_config_args(p_mc)
    p_mc.add_argument("--controllers", default="iscc,lqg,noncausal",
                      help="comma-separated controller list")
    p_mc.add_argument("--trials", type=int, default=20)
    p_mc.add_argument("--seed", type=int, default=0,
                      help="base seed; trial m uses seed+m")

    p_ver = sub.add_parser("verify", help="run the oracle/property suite")
    p_ver.add_argument("--suite", action="append", default=[],
                       help="suite name (repeatable); default all")

    p_plot = sub.add_parser("export-plots",
                            help="write per-figure data files and images")
    _add_config_args(p_plot)
    p_plot.add_argument("--trials", type=int, default=10)
    p_plot.add_argument("--seed", type=int, default=1)

    return parser


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.preset, args.overrides)
    trace = run_episode(cfg, args.controller, args.seed)
    path = os.path.join(args.out,
                        f"trace_{args.controller}_seed{args.seed}.csv")
    write_trace(path, trace)
    frac = float((trace.rate >= cfg.rate_threshold - 1e-9).mean())
    print(f"wrote {path} ({trace.n_slots} slots, rate-ok fraction {frac:.3f})")
    return 0


def _cmd_montecarlo(args) -> int:
    cfg = load_config(args.config, args.preset, args.overrides)
    controllers = [c.strip() for c in args.controllers.split(",") if c.strip()]
    for c in controllers:
        if c not in CONTROLLERS:
            raise ConfigError(f"unknown controller {c!r}")
    summary_rows = []
    for c in controllers:
        metrics = run_monte_carlo(cfg, c, args.trials, args.seed,
                                  threads=_threads())
        path = os.path.join(args.out, f"metrics_{c}.csv")
        write_metrics(path, metrics)
        print(f"wrote {path}")
        summary_rows.append((c, cfg.init_mode, args.trials,
                             metrics.mean_fraction, metrics.min_fraction,
                             metrics.rms_error[-1], metrics.rmse_position[-1],
                             metrics.rmse_velocity[-1]))
    summary = os.path.join(args.out, "summary.csv")
    write_csv(summary,
              ("controller", "init_mode", "trials", "mean_rate_fraction",
               "min_rate_fraction", "final_rms_e", "final_rmse_p",
               "final_rmse_v"),
              summary_rows)
    print(f"wrote {summary}")
    for row in summary_rows:
        print(f"  {row[0]:9s} rate-ok mean {row[3]:.3f} min {row[4]:.3f} "
              f"final rms_e {row[5]:.3f}")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_suite

    results = run_suite(args.suite or None)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name}: {r.detail}")
        failed += 0 if r.passed else 1
    if failed:
        print(f"{failed}/{len(results)} checks failed")
        return 3
    print(f"all {len(results)} checks passed")
    return 0


def _cmd_export_plots(args) -> int:
    from .plots import export_all

    cfg = load_config(args.config, args.preset, args.overrides)
    written = export_all(cfg, args.out, trials=args.trials, seed=args.seed,
                         threads=_threads())
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "montecarlo":
            return _cmd_montecarlo(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "export-plots":
            return _cmd_export_plots(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
