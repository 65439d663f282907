"""Command-line entry point for solves, analyses and the benchmark suites.

Usage:
    sesop-bench solve config/experiment.yaml --out results/
    sesop-bench analyze config/experiment.yaml
    sesop-bench table1 --scale 0.5 --workers 4
    sesop-bench run fig5 --seed 3
    sesop-bench list

Exits 0 on success, 2 on an invalid configuration and 3 when a run stopped
without meeting its tolerance.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from ..config import ExperimentConfig, LoggingSpec
from ..exceptions import ConfigError, ConvergenceError, LineSearchError, SolverBreakdown
from .output import emit_plotdata
from .presets import load_preset, preset_names
from .report import RunReport
from .runner import analyze, run_experiment, run_suite

OUT_ENV = "SESOP_MG_OUT"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3

logger = logging.getLogger(__name__)


def configure_logging(spec: LoggingSpec, override: str | None = None) -> None:
    level = (override or spec.level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, force=True)
    for module, module_level in spec.modules.items():
        logging.getLogger(module).setLevel(getattr(logging, module_level.upper()))


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help=f"Output directory (default: ${OUT_ENV})")
    common.add_argument("--seed", type=int, default=None, help="Seed for the random initial guess")
    common.add_argument("--log-level", default=None, help="Root log level, e.g. DEBUG")

    suite_opts = argparse.ArgumentParser(add_help=False)
    suite_opts.add_argument("--scale", type=float, default=1.0, help="Scale factor for the fine grids")
    suite_opts.add_argument("--workers", type=int, default=None, help="Parallel worker processes")

    p = argparse.ArgumentParser(
        prog="sesop-bench",
        description="Subspace-optimization multigrid solvers and experiments",
    )
    sub = p.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="Solve one experiment configuration")
    solve.add_argument("config", help="Path to an experiment YAML file")
    solve.add_argument("--strict", action="store_true", help="Report an unconverged run as an error")

    an = sub.add_parser("analyze", parents=[common], help="Fourier analysis or gradient check only")
    an.add_argument("config", help="Path to an experiment YAML file")

    run = sub.add_parser("run", parents=[common, suite_opts], help="Run a named benchmark suite")
    run.add_argument("preset", help="Suite name (see 'list')")

    for name in preset_names():
        sub.add_parser(name, parents=[common, suite_opts], help=f"Run the {name} suite")

    sub.add_parser("list", help="List the benchmark suites")
    return p


def _load_config(args: argparse.Namespace, out: str | None) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    overrides: dict = {}
    if out is not None:
        overrides["output"] = out
    if args.seed is not None:
        overrides["seed"] = args.seed
    return cfg.with_overrides(overrides) if overrides else cfg


def _print_report(report: RunReport) -> None:
    row = report.summary_row()
    fields = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items() if v is not None)
    print(fields)


def _finish(reports: list[RunReport], what: str) -> int:
    unconverged = [r.label for r in reports if not r.converged]
    if unconverged:
        print(f"FAIL: {what}: not converged: {', '.join(unconverged)}", file=sys.stderr)
        return EXIT_UNCONVERGED
    print(f"OK: {what}: {len(reports)} report(s)")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = _parser().parse_args(argv)
    if args.command == "list":
        for name in preset_names():
            suite = load_preset(name)
            print(f"{name}: {suite.description}")
        return EXIT_OK

    out = args.out or os.environ.get(OUT_ENV)
    try:
        if args.command in ("solve", "analyze"):
            cfg = _load_config(args, out)
            configure_logging(cfg.logging, args.log_level)
            if args.command == "solve":
                reports = [run_experiment(cfg, strict=args.strict)]
            else:
                reports = [analyze(cfg)]
        else:
            configure_logging(LoggingSpec(), args.log_level)
            name = args.preset if args.command == "run" else args.command
            suite = load_preset(name, scale=args.scale, seed=args.seed, out=out)
            reports = run_suite(suite, workers=args.workers)
            if out is None:
                logger.info("no output directory given; plot data not written")
    except ConfigError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except (LineSearchError, SolverBreakdown, ValueError) as exc:
        print(f"FAIL: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED

    for report in reports:
        _print_report(report)
    if args.command == "solve" and out is not None and reports[0].trace is not None:
        emit_plotdata(reports, out, summary_name=reports[0].label)
    return _finish(reports, args.command)


if __name__ == "__main__":
    sys.exit(main())
