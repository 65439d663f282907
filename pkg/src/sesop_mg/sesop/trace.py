"""Convergence traces shared by SESOP and every baseline solver."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import logging
import math
import time

import numpy as np

from ..problems import ProblemLevel

logger = logging.getLogger(__name__)

FACTOR_WINDOW = 10


@dataclass
class TraceRecord:
    iteration: int
    value: float
    objective: float
    seconds: float
    factor: float | None = None


@dataclass
class ConvergenceTrace:
    """Per-iteration metric: residual norm for linear levels, objective gap otherwise."""

    metric: str = "residual"
    records: list[TraceRecord] = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""

    def append(self, iteration: int, value: float, objective: float, seconds: float) -> TraceRecord:
        if self.records and iteration <= self.records[-1].iteration:
            raise ValueError(
                f"iteration {iteration} does not follow {self.records[-1].iteration}"
            )
        factor = None
        if len(self.records) >= FACTOR_WINDOW:
            factor = _window_factor(self.records[-FACTOR_WINDOW].value, value, FACTOR_WINDOW)
        record = TraceRecord(iteration, float(value), float(objective), float(seconds), factor)
        self.records.append(record)
        return record

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration if self.records else 0

    @property
    def last(self) -> TraceRecord:
        return self.records[-1]

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    def as_rows(self) -> list[dict]:
        return [asdict(r) for r in self.records]

    def as_dict(self) -> dict:
        return {
            "metric": self.metric,
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "iterations": self.iterations,
            "records": self.as_rows(),
        }


def _window_factor(first: float, last: float, window: int) -> float | None:
    if first <= 0.0 or last <= 0.0:
        return None
    return (last / first) ** (1.0 / window)


def estimate_practical_factor(trace: ConvergenceTrace, window: int = FACTOR_WINDOW) -> float:
    """Geometric-mean per-iteration reduction over the last ``window`` iterations."""
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    if len(trace.records) < 2:
        raise ValueError("need at least two trace records")
    window = min(window, len(trace.records) - 1)
    first = trace.records[-window - 1].value
    last = trace.records[-1].value
    factor = _window_factor(first, last, window)
    if factor is None:
        raise ValueError(f"metric must stay positive to form a factor ({first:.3e} -> {last:.3e})")
    return factor


@dataclass(frozen=True)
class StopRule:
    tol: float = 1e-8
    gap_tol: float = 1e-10
    max_iter: int = 500
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be nonnegative, got {self.max_iter}")
        if self.tol <= 0.0 or self.gap_tol <= 0.0:
            raise ValueError("stopping tolerances must be positive")


class TraceMonitor:
    """Evaluates the stopping metric identically for every solver.

    Linear levels track ``||f - A x||_F``. Nonlinear levels track
    ``F(x) - F*`` when a reference value is given, and the gradient norm
    otherwise.
    """

    def __init__(self, level: ProblemLevel, stop: StopRule, reference_objective: float | None = None):
        self.level = level
        self.stop = stop
        self.reference_objective = reference_objective
        if level.is_linear:
            metric = "residual"
        elif reference_objective is not None:
            metric = "gap"
        else:
            metric = "gradient"
        self.trace = ConvergenceTrace(metric=metric)
        self._start = time.perf_counter()

    def _metric(self, x: np.ndarray) -> tuple[float, float]:
        objective = self.level.objective(x)
        if self.trace.metric == "gap":
            return objective - self.reference_objective, objective
        return float(np.linalg.norm(self.level.gradient(x))), objective

    def _reached(self, value: float) -> bool:
        if self.trace.metric == "gap":
            return value <= self.stop.gap_tol * abs(self.reference_objective)
        return value < self.stop.tol

    def record(self, iteration: int, x: np.ndarray) -> bool:
        """Append one record; ``True`` once the run should stop."""
        value, objective = self._metric(x)
        elapsed = time.perf_counter() - self._start
        self.trace.append(iteration, value, objective, elapsed)
        if not math.isfinite(value):
            self.trace.stop_reason = "diverged"
            logger.warning("metric became non-finite at iteration %d", iteration)
            return True
        if self._reached(value):
            self.trace.converged = True
            self.trace.stop_reason = "tolerance"
            return True
        if iteration >= self.stop.max_iter:
            self.trace.stop_reason = "max_iter"
            return True
        if self.stop.max_seconds is not None and elapsed > self.stop.max_seconds:
            self.trace.stop_reason = "time"
            return True
        return False
