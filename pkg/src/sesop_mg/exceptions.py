"""Exception types raised by the solvers and the experiment runner."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Carries the individual problems so callers can report every offending
    field at once.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__(
            "Experiment configuration errors:\n"
            + "\n".join(f"- {e}" for e in self.errors)
        )


class LineSearchError(RuntimeError):
    """Backtracking exhausted its halvings without sufficient decrease."""


class SolverBreakdown(RuntimeError):
    """A Krylov recurrence met a non-positive curvature."""


class ConvergenceError(RuntimeError):
    """The iteration budget ran out before the stopping rule was met."""
