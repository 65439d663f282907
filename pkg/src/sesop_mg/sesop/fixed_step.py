"""Fixed-stepsize counterpart of SESOP-TG on linear problems.

The three subspace directions are weighted by constants chosen in advance
(from the two-grid analysis) instead of by an exact subspace minimization.
"""

from __future__ import annotations

import logging

import numpy as np

from ..analysis.tg import FixedCoefficients
from ..hierarchy import Hierarchy
from ..relaxation import PreconditionerKind, precondition
from .cycles import SesopOptions, SolveResult, sesop_mg_coarse_solver
from .trace import StopRule, TraceMonitor

logger = logging.getLogger(__name__)


def coarse_correction(hier: Hierarchy, x: np.ndarray, options: SesopOptions | None = None) -> np.ndarray:
    """``P A_H^{-1} R r`` exactly, or its SESOP-MG approximation when ``options`` is given."""
    fine = hier.finest
    if options is None or hier.depth == 2:
        r = -fine.gradient(x)
        return hier.prolong(0, hier.solve_linear(1, hier.restrict(0, r)))
    xc0 = hier.restrict(0, x)
    xc = sesop_mg_coarse_solver(hier, 1, xc0, fine.gradient(x), options)
    return hier.prolong(0, xc - xc0)


def fixed_step_iterate(
    hier: Hierarchy,
    x_prev: np.ndarray,
    x_prev2: np.ndarray,
    c: FixedCoefficients,
    *,
    preconditioner: PreconditionerKind | str = PreconditionerKind.JACOBI,
    options: SesopOptions | None = None,
) -> np.ndarray:
    """``x_prev + c1 (x_prev - x_prev2) + c2 Phi r + c3 P A_H^{-1} R r``."""
    fine = hier.finest
    if not fine.is_linear:
        raise ValueError("fixed-step iteration needs a linear problem")
    r = -fine.gradient(x_prev)
    step = x_prev + c.c1 * (x_prev - x_prev2)
    if c.c2 != 0.0:
        step = step + c.c2 * precondition(
            preconditioner, r, diagonal=fine.diagonal, split=fine.triangular_split
        )
    if c.c3 != 0.0:
        if hier.depth < 2:
            raise ValueError("a nonzero c3 needs a coarse level")
        step = step + c.c3 * coarse_correction(hier, x_prev, options)
    return step


class FixedStepSolver:
    """Runs the three-term recurrence with ``x_{-1} = x_0``."""

    def __init__(
        self,
        hier: Hierarchy,
        coefficients: FixedCoefficients,
        stop: StopRule | None = None,
        *,
        preconditioner: PreconditionerKind | str = PreconditionerKind.JACOBI,
        options: SesopOptions | None = None,
    ):
        self.hier = hier
        self.coefficients = coefficients
        self.stop = stop or StopRule()
        self.preconditioner = PreconditionerKind(preconditioner)
        self.options = options

    def solve(self, x0: np.ndarray) -> SolveResult:
        monitor = TraceMonitor(self.hier.finest, self.stop)
        x_prev2 = np.array(x0, dtype=float)
        x_prev = x_prev2.copy()
        iteration = 0
        stopped = monitor.record(iteration, x_prev)
        while not stopped:
            x_next = fixed_step_iterate(
                self.hier,
                x_prev,
                x_prev2,
                self.coefficients,
                preconditioner=self.preconditioner,
                options=self.options,
            )
            x_prev2, x_prev = x_prev, x_next
            iteration += 1
            stopped = monitor.record(iteration, x_prev)
        logger.info(
            "fixed-step run %s stopped after %d iterations (%s)",
            self.coefficients.as_dict(),
            iteration,
            monitor.trace.stop_reason,
        )
        return SolveResult(x_prev, monitor.trace)
