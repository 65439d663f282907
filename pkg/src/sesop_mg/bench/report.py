"""Run reports: configuration echo, trace and factors."""

from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import json
import math
from typing import Any

from ..sesop.trace import ConvergenceTrace

WALL_CLOCK_KEYS = ("seconds",)


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


@dataclass
class RunReport:
    label: str
    config: dict[str, Any]
    trace: ConvergenceTrace | None = None
    measured_factor: float | None = None
    predicted_factor: float | None = None
    r_ratio: float | None = None
    coefficients: dict[str, float | None] | None = None
    reference: Any = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.trace is None or self.trace.converged

    def as_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "config": self.config,
            "measured_factor": _finite_or_none(self.measured_factor),
            "predicted_factor": _finite_or_none(self.predicted_factor),
            "r_ratio": _finite_or_none(self.r_ratio),
            "coefficients": self.coefficients,
            "reference": self.reference,
            "extra": self.extra,
            "trace": self.trace.as_dict() if self.trace is not None else None,
        }

    def summary_row(self) -> dict[str, Any]:
        row = {
            "label": self.label,
            "iterations": self.trace.iterations if self.trace else None,
            "converged": self.converged,
            "measured_factor": _finite_or_none(self.measured_factor),
            "predicted_factor": _finite_or_none(self.predicted_factor),
            "r_ratio": _finite_or_none(self.r_ratio),
            "reference": self.reference,
        }
        row.update({k: v for k, v in self.extra.items() if not isinstance(v, (dict, list))})
        return row

    def content_hash(self) -> str:
        """SHA-256 of the report with wall-clock fields removed."""
        payload = self.as_dict()
        if payload["trace"] is not None:
            payload["trace"]["records"] = [
                {k: v for k, v in row.items() if k not in WALL_CLOCK_KEYS}
                for row in payload["trace"]["records"]
            ]
        text = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
