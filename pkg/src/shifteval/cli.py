"""Command line entry point: ``shifteval {run,impact,forecast,protocol,validate}``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .forecast import DEFAULT_HORIZON, DEFAULT_LEVEL, DEFAULT_PATHS, forecast_series
from .harness import RunConfig, build_grouped_experiment, describe, run
from .impact import GroupedExperiment, build_impact_report
from .plots import render_forecast_svg, render_impact_svg
from .protocol import DEFAULT_WINDOW, ProtocolConfig, export_report, run_protocol
from .series import ValidationError, aggregate_mean, check_pre_treatment_equality, matrix_to_csv, read_csv, rolling_mean


def _seeds(text: str) -> tuple[int, ...]:
    """``10`` means seeds 0..9; ``1,42`` lists them explicitly."""
    if "," in text:
        return tuple(int(s) for s in text.split(",") if s.strip())
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("--seeds must be positive")
    return tuple(range(n))


def _write(out: str | None, name: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    if target.suffix == "":
        target.mkdir(parents=True, exist_ok=True)
        target = target / name
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    print(f"wrote {target}", file=sys.stderr)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_run(args) -> int:
    config = RunConfig.from_json(args.config)
    if args.seeds:
        config = dataclasses.replace(config, seeds=args.seeds)
    if args.describe:
        sys.stdout.write(_dump(describe(config)))
        return 0
    _write(args.out, "run.csv", matrix_to_csv(run(config)))
    return 0


def cmd_impact(args) -> int:
    if args.config:
        config = RunConfig.from_json(args.config)
        if args.seeds:
            config = dataclasses.replace(config, seeds=args.seeds)
        exp = build_grouped_experiment(config)
    else:
        if not (args.treatment and args.control and args.at):
            raise ValidationError("impact needs --config, or --treatment, --control and --at")
        exp = GroupedExperiment(read_csv(args.treatment), read_csv(args.control), args.at)
    report = build_impact_report(exp, args.window, pre_gap_tol=args.tol)
    if report.fixed_seed_violation:
        print(f"warning: pre-treatment gap {report.pre_gap:g} exceeds tolerance {args.tol:g}", file=sys.stderr)
    _write(args.out, "impact.json", _dump(report.to_dict()))
    if args.out and not args.no_plots:
        _write(args.out, "impact.svg", render_impact_svg(report))
    return 0


def cmd_forecast(args) -> int:
    matrix = read_csv(args.csv)
    history = rolling_mean(aggregate_mean(matrix), args.window)
    _, band = forecast_series(history, args.horizon, args.level, args.paths, args.noise_seed)
    _write(args.out, "forecast.json", _dump(band.to_dict()))
    if args.out and not args.no_plots:
        _write(args.out, "forecast.svg", render_forecast_svg(history, [(Path(args.csv).stem, band)]))
    return 0


def cmd_protocol(args) -> int:
    config = ProtocolConfig.from_json(args.config)
    overrides = {}
    if args.seeds:
        overrides["seeds"] = args.seeds
    if args.horizon is not None:
        overrides["forecast_horizon"] = args.horizon
    if args.level is not None:
        overrides["interval_level"] = args.level
    if args.window is not None:
        overrides["rolling_window"] = args.window
    if overrides:
        config = dataclasses.replace(config, **overrides)
    report = run_protocol(config)
    files = export_report(report, args.out, plots=not args.no_plots)
    skipped = [c for c in report.cells if not c.ok]
    for c in skipped:
        print(f"skipped {'/'.join(c.key)}: {c.reason}", file=sys.stderr)
    print(f"wrote {len(files)} files under {args.out}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    a, b = read_csv(args.a), read_csv(args.b)
    rep = check_pre_treatment_equality(a, b, args.at, args.tol)
    out = {
        "passed": rep.passed,
        "T": rep.T,
        "tol": rep.tol,
        "max_abs_diff": rep.max_abs_diff,
        "per_seed": {str(k): v for k, v in rep.per_seed.items()},
        "first_violation": None
        if rep.first_violation is None
        else {"seed": rep.first_violation[0], "episode": rep.first_violation[1]},
    }
    sys.stdout.write(_dump(out))
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shifteval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one harness configuration and emit a CSV")
    p.add_argument("config", help="RunConfig JSON file")
    p.add_argument("--seeds", type=_seeds)
    p.add_argument("--out", help="output CSV file or directory (default: stdout)")
    p.add_argument("--describe", action="store_true", help="print the resolved shift schedule instead of running")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("impact", help="difference-in-differences impact report")
    p.add_argument("--config", help="RunConfig JSON with a controlled shift")
    p.add_argument("--treatment", help="treatment CSV")
    p.add_argument("--control", help="control CSV")
    p.add_argument("--at", type=int, help="intervention episode (1-based)")
    p.add_argument("--seeds", type=_seeds)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--tol", type=float, default=0.0, help="allowed pre-treatment gap")
    p.add_argument("--out", help="output directory (default: JSON to stdout)")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_impact)

    p = sub.add_parser("forecast", help="damped-trend forecast with prediction intervals")
    p.add_argument("csv", help="performance CSV (seed,episode,return)")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--level", type=float, default=DEFAULT_LEVEL)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--out", help="output directory (default: JSON to stdout)")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("protocol", help="run the full evaluation protocol")
    p.add_argument("config", help="ProtocolConfig JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seeds", type=_seeds)
    p.add_argument("--horizon", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("validate", help="check two CSVs agree before the intervention")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--at", type=int, required=True, help="intervention episode (1-based)")
    p.add_argument("--tol", type=float, default=0.0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
