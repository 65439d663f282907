"""Subspace-optimization multigrid solvers for linear and variational problems"""

__version__ = "0.1.0"

from .analysis import FixedCoefficients, fixed_step_factor, minimize_kappa, ordinary_coefficients
from .baselines import BaselineKind, BaselineOptions, run_baseline
from .config import Config, ExperimentConfig
from .exceptions import ConfigError, ConvergenceError, LineSearchError, SolverBreakdown
from .grid import GridField, StencilOp
from .hierarchy import Hierarchy, build_hierarchy
from .problems import ExpVariationalProblem, PLaplacianProblem, RotatedAnisotropicProblem
from .sesop import (
    ConvergenceTrace,
    FixedStepSolver,
    SesopOptions,
    SesopSolver,
    SolveResult,
    StopRule,
)
from .transfer import ProlongationKind, TransferPair
from .validator import GradientCheck, check_gradient

__all__ = [
    "BaselineKind",
    "BaselineOptions",
    "Config",
    "ConfigError",
    "ConvergenceError",
    "ConvergenceTrace",
    "ExpVariationalProblem",
    "ExperimentConfig",
    "FixedCoefficients",
    "FixedStepSolver",
    "GradientCheck",
    "GridField",
    "Hierarchy",
    "LineSearchError",
    "PLaplacianProblem",
    "ProlongationKind",
    "RotatedAnisotropicProblem",
    "SesopOptions",
    "SesopSolver",
    "SolveResult",
    "SolverBreakdown",
    "StencilOp",
    "StopRule",
    "TransferPair",
    "build_hierarchy",
    "check_gradient",
    "fixed_step_factor",
    "minimize_kappa",
    "ordinary_coefficients",
    "run_baseline",
]
