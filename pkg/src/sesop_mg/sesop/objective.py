"""Coarse functionals shifted by the linear correction term ``v``."""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from ..problems import ProblemLevel
from ..relaxation import TriangularSplit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoarseCorrectionTerm:
    """``v = grad F_H(x_H) - R grad F_h(x_h)`` fixed at construction."""

    v: np.ndarray

    @classmethod
    def at(cls, level: ProblemLevel, x_build: np.ndarray, restricted_gradient: np.ndarray) -> CoarseCorrectionTerm:
        return cls(level.gradient(x_build) - restricted_gradient)


@dataclass(frozen=True, eq=False)
class CorrectedObjective:
    """``sigma(x) = F(x) - v.x`` on one level; ``v = None`` is the plain level."""

    level: ProblemLevel
    correction: CoarseCorrectionTerm | None = None

    @property
    def n(self) -> int:
        return self.level.n

    @property
    def is_linear(self) -> bool:
        return self.level.is_linear

    @property
    def matrix(self):
        return self.level.matrix

    @property
    def diagonal(self) -> np.ndarray | None:
        return self.level.diagonal

    @property
    def triangular_split(self) -> TriangularSplit | None:
        return self.level.triangular_split

    @property
    def shift(self) -> np.ndarray:
        if self.correction is None:
            return np.zeros((self.n, self.n))
        return self.correction.v

    def objective(self, x: np.ndarray) -> float:
        value = self.level.objective(x)
        if self.correction is not None:
            value -= float(np.vdot(self.correction.v, x))
        return value

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = self.level.gradient(x)
        if self.correction is not None:
            g = g - self.correction.v
        return g

    def hess_apply(self, p: np.ndarray) -> np.ndarray:
        return self.level.hess_apply(p)

    def linear_rhs(self) -> np.ndarray:
        """Right-hand side of ``A x = f + v`` for quadratic levels."""
        if not self.is_linear:
            raise ValueError(f"{self.level.name} is not linear")
        return self.level.rhs + self.shift
