"""CSV and JSON writers for run reports.

Every file is written to a temporary sibling first and moved into place with
``os.replace``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
import csv
import io
import json
import logging
import os
from pathlib import Path
import re
import tempfile

from .report import RunReport

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("iteration", "residual_or_gap", "objective", "factor", "seconds")


def slugify(label: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_").lower()
    return slug or "run"


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s", path)
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trace_csv(report: RunReport) -> str:
    rows = []
    if report.trace is not None:
        for r in report.trace.records:
            rows.append([_cell(r.iteration), _cell(r.value), _cell(r.objective), _cell(r.factor), _cell(r.seconds)])
    return _csv_text(TRACE_COLUMNS, rows)


def summary_csv(reports: Sequence[RunReport]) -> str:
    rows = [r.summary_row() for r in reports]
    header: list[str] = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    return _csv_text(header, ([_cell(row.get(k)) for k in header] for row in rows))


def write_report(report: RunReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    stem = slugify(report.label)
    csv_path = atomic_write_text(out_dir / f"{stem}.csv", trace_csv(report))
    json_path = atomic_write_text(
        out_dir / f"{stem}.json", json.dumps(report.as_dict(), indent=2, sort_keys=True, default=str) + "\n"
    )
    return csv_path, json_path


def emit_plotdata(reports: Sequence[RunReport], out_dir: str | Path, *, summary_name: str = "summary") -> list[Path]:
    """One trace CSV per report plus a summary table and a side-by-side comparison file."""
    if not reports:
        raise ValueError("no reports to write")
    out_dir = Path(out_dir)
    written: list[Path] = []
    for report in reports:
        if report.trace is not None:
            written.append(atomic_write_text(out_dir / f"{slugify(report.label)}.csv", trace_csv(report)))
    written.append(atomic_write_text(out_dir / f"{summary_name}.csv", summary_csv(reports)))
    traced = [r for r in reports if r.trace is not None]
    if len(traced) > 1:
        written.append(atomic_write_text(out_dir / f"{summary_name}_comparison.csv", comparison_csv(traced)))
    logger.info("wrote %d files to %s", len(written), out_dir)
    return written


def comparison_csv(reports: Sequence[RunReport]) -> str:
    """Metric per iteration, one column per report (blank after a run stops)."""
    length = max(len(r.trace.records) for r in reports)
    header = ["iteration", *(r.label for r in reports)]
    rows = []
    for k in range(length):
        row = [str(k)]
        for r in reports:
            records = r.trace.records
            row.append(_cell(records[k].value) if k < len(records) else "")
        rows.append(row)
    return _csv_text(header, rows)
