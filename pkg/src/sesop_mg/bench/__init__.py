"""Experiment runner, benchmark suites and report writers."""

from .output import emit_plotdata, write_report
from .presets import Suite, SuiteEntry, load_preset, parse_suite, preset_names
from .report import RunReport
from .runner import analyze, r_ratio, run_experiment, run_rratio_sweep, run_suite, run_table2

__all__ = [
    "RunReport",
    "Suite",
    "SuiteEntry",
    "analyze",
    "emit_plotdata",
    "load_preset",
    "parse_suite",
    "preset_names",
    "r_ratio",
    "run_experiment",
    "run_rratio_sweep",
    "run_suite",
    "run_table2",
    "write_report",
]
