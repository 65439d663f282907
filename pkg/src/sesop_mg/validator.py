"""Finite-difference checks for objective/gradient pairs."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import logging

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradientCheck:
    max_relative_error: float
    errors: tuple[float, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error < self.tolerance

    def as_dict(self) -> dict:
        return {
            "max_relative_error": self.max_relative_error,
            "errors": list(self.errors),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def check_gradient(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    *,
    directions: int = 10,
    rel_step: float = 1e-5,
    tolerance: float = 1e-6,
    seed: int | None = 0,
) -> GradientCheck:
    """Compare ``grad.d`` with central differences along random unit directions.

    The step is ``rel_step * ||x||`` (``rel_step`` when ``x`` is zero).
    """
    if directions < 1:
        raise ValueError(f"directions must be positive, got {directions}")
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=float)
    g = gradient(x)
    norm = float(np.linalg.norm(x))
    eps = rel_step * (norm if norm > 0.0 else 1.0)
    errors = []
    for _ in range(directions):
        d = rng.standard_normal(x.shape)
        d /= np.linalg.norm(d)
        exact = float(np.vdot(g, d))
        fd = (objective(x + eps * d) - objective(x - eps * d)) / (2.0 * eps)
        scale = max(abs(exact), abs(fd), np.finfo(float).tiny)
        errors.append(abs(exact - fd) / scale)
    result = GradientCheck(max(errors), tuple(errors), tolerance)
    if not result.passed:
        logger.warning("gradient check failed: max relative error %.3e", result.max_relative_error)
    return result
