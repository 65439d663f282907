"""Benchmark suites shipped as YAML package data under ``suites/``.

A suite file has a ``base`` experiment configuration and one of three bodies:

- ``kind: runs`` with a ``runs`` list of ``{label, config, reference}``
  overrides, each solved as one experiment;
- ``kind: table2`` with ``rows`` of anisotropic settings, each producing the
  ordinary / subspace / optimized factor triple;
- ``kind: rratio`` with ``target``, ``nums`` and ``variants`` for the
  stepsize-determination study.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
import logging
import math
from pathlib import Path
from typing import Any

import yaml

from ..config import ExperimentConfig, merge_dicts
from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

SUITE_KINDS = ("runs", "table2", "rratio")
_SUITE_KEYS = {"name", "description", "kind", "base", "runs", "rows", "target", "nums", "variants", "notes"}
MIN_SCALED_POINTS = 8


@dataclass(frozen=True)
class SuiteEntry:
    label: str
    config: ExperimentConfig
    reference: Any = None


@dataclass(frozen=True)
class Suite:
    name: str
    kind: str
    entries: list[SuiteEntry] = field(default_factory=list)
    description: str = ""
    target: int | None = None
    nums: list[int] = field(default_factory=list)


def scaled_grid(fine_n: int, coarsest_n: int, scale: float) -> tuple[int, int]:
    """Shrink or grow the fine grid by ``scale``, keeping ``n + 1`` a power-of-two multiple.

    Two-level grids stay two-level.
    """
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    if scale == 1.0:
        return fine_n, coarsest_n
    points = max(MIN_SCALED_POINTS, 2 ** round(math.log2((fine_n + 1) * scale)))
    if fine_n == 2 * coarsest_n + 1 or points < 2 * (coarsest_n + 1):
        return points - 1, points // 2 - 1
    return points - 1, coarsest_n


def _entry_config(base: dict, overrides: dict, scale: float, seed: int | None, out: Path | None, label: str) -> ExperimentConfig:
    merged = merge_dicts(base, overrides or {})
    merged.setdefault("name", label)
    grid = merged.get("grid", {})
    fine = grid.get("fine_n", ExperimentConfig().grid.fine_n)
    coarsest = grid.get("coarsest_n", ExperimentConfig().grid.coarsest_n)
    if isinstance(fine, int) and isinstance(coarsest, int) and scale != 1.0:
        fine, coarsest = scaled_grid(fine, coarsest, scale)
        merged["grid"] = {**grid, "fine_n": fine, "coarsest_n": coarsest}
    if seed is not None:
        merged["seed"] = seed
    if out is not None:
        merged["output"] = str(out)
    return ExperimentConfig.from_dict(merged)


def parse_suite(
    data: dict,
    *,
    scale: float = 1.0,
    seed: int | None = None,
    out: str | Path | None = None,
) -> Suite:
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["suite: must be a mapping"])
    for key in data:
        if key not in _SUITE_KEYS:
            errors.append(f"{key}: unknown key")
    name = data.get("name", "suite")
    kind = data.get("kind", "runs")
    if kind not in SUITE_KINDS:
        errors.append(f"kind: must be one of {', '.join(SUITE_KINDS)}, got {kind!r}")
    base = data.get("base", {}) or {}
    out_dir = Path(out) / name if out is not None else None
    entries: list[SuiteEntry] = []

    def add(label: str, overrides: dict, reference: Any = None) -> None:
        try:
            overrides = merge_dicts(overrides or {}, {"name": label})
            entries.append(SuiteEntry(label, _entry_config(base, overrides, scale, seed, out_dir, label), reference))
        except ConfigError as exc:
            errors.extend(f"{label}: {e}" for e in exc.errors)

    if kind == "runs":
        for i, run in enumerate(data.get("runs") or []):
            label = run.get("label", f"run{i}")
            add(label, run.get("config", {}), run.get("reference"))
    elif kind == "table2":
        for i, row in enumerate(data.get("rows") or []):
            add(row.get("label", f"row{i}"), row.get("config", {}), row.get("reference"))
    elif kind == "rratio":
        for i, variant in enumerate(data.get("variants") or []):
            add(variant.get("label", f"variant{i}"), variant.get("config", {}))
        if not isinstance(data.get("target"), int):
            errors.append("target: must be an integer frequency-grid size")
        nums = data.get("nums") or []
        if not nums or not all(isinstance(n, int) for n in nums):
            errors.append("nums: must be a nonempty list of integers")
    if not entries and not errors:
        errors.append("suite has no runs")
    if errors:
        raise ConfigError(errors)
    return Suite(
        name=name,
        kind=kind,
        entries=entries,
        description=data.get("description", ""),
        target=data.get("target"),
        nums=list(data.get("nums") or []),
    )


def preset_names() -> list[str]:
    root = resources.files(__package__).joinpath("suites")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_preset(name: str, **kwargs) -> Suite:
    path = resources.files(__package__).joinpath("suites", f"{name}.yaml")
    if not path.is_file():
        raise ConfigError([f"{name}: no such preset (known: {', '.join(preset_names())})"])
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    logger.debug("loaded preset %s", name)
    return parse_suite(data, **kwargs)
