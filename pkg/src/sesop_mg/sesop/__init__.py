"""Sequential subspace optimization with multigrid search directions."""

from .cycles import (
    CoarsestSolver,
    CycleSpec,
    SesopOptions,
    SesopSolver,
    SesopState,
    SolveResult,
    coarse_correction_direction,
    corrected_objective,
    initial_guess,
    sesop_mg_coarse_solver,
    sesop_tg_step,
)
from .fixed_step import FixedStepSolver, coarse_correction, fixed_step_iterate
from .objective import CoarseCorrectionTerm, CorrectedObjective
from .subspace import SubspaceBasis, subspace_minimize_newton, subspace_minimize_quadratic
from .trace import ConvergenceTrace, StopRule, TraceMonitor, TraceRecord, estimate_practical_factor

__all__ = [
    "CoarseCorrectionTerm",
    "CoarsestSolver",
    "ConvergenceTrace",
    "CorrectedObjective",
    "CycleSpec",
    "FixedStepSolver",
    "SesopOptions",
    "SesopSolver",
    "SesopState",
    "SolveResult",
    "StopRule",
    "SubspaceBasis",
    "TraceMonitor",
    "TraceRecord",
    "coarse_correction",
    "coarse_correction_direction",
    "corrected_objective",
    "estimate_practical_factor",
    "fixed_step_iterate",
    "initial_guess",
    "sesop_mg_coarse_solver",
    "sesop_tg_step",
    "subspace_minimize_newton",
    "subspace_minimize_quadratic",
]
