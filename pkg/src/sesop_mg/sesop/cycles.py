"""SESOP two-grid steps and the recursive SESOP multigrid coarse solver.

Every coarse level ``l`` minimizes ``sigma_l(x) = F_l(x) - v_l.x`` where
``v_l`` makes the gradient of ``sigma_l`` at the restricted iterate equal the
restricted parent gradient. ``sigma_l`` is built from the incoming iterate,
then relaxed, then corrected from level ``l + 1`` and minimized over its own
search subspace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
import logging

import numpy as np
from scipy import optimize
from typing_extensions import Self

from ..exceptions import ConvergenceError
from ..hierarchy import Hierarchy
from ..relaxation import PreconditionerKind, RelaxationKind, Relaxer, precondition
from .objective import CoarseCorrectionTerm, CorrectedObjective
from .subspace import SubspaceBasis, history_directions, subspace_minimize_newton, subspace_minimize_quadratic
from .trace import ConvergenceTrace, StopRule, TraceMonitor

logger = logging.getLogger(__name__)


class CoarsestSolver(str, Enum):
    DIRECT = "direct"
    QUASI_NEWTON = "quasi_newton"


@dataclass(frozen=True)
class CycleSpec:
    cycle_type: int = 1
    coarsest_solver: CoarsestSolver = CoarsestSolver.DIRECT
    coarsest_max_iter: int = 10

    def __post_init__(self) -> None:
        object.__setattr__(self, "coarsest_solver", CoarsestSolver(self.coarsest_solver))
        if self.cycle_type not in (1, 2):
            raise ValueError(f"cycle_type must be 1 (V) or 2 (W), got {self.cycle_type}")
        if self.coarsest_max_iter < 1:
            raise ValueError(f"coarsest_max_iter must be positive, got {self.coarsest_max_iter}")


@dataclass(frozen=True)
class SesopOptions:
    """``history`` is the count of previous steps kept in the subspace."""

    history: int = 1
    preconditioner: PreconditionerKind = PreconditionerKind.JACOBI
    relaxer: Relaxer = field(default_factory=Relaxer)
    coarse_relaxer: Relaxer = field(default_factory=lambda: Relaxer(v1=2, v2=1))
    cycle: CycleSpec = field(default_factory=CycleSpec)
    use_coarse_correction: bool = True
    use_gradient: bool = True
    newton_iters: int = 10

    def __post_init__(self) -> None:
        object.__setattr__(self, "preconditioner", PreconditionerKind(self.preconditioner))
        if self.history < 0:
            raise ValueError(f"history must be nonnegative, got {self.history}")


@dataclass
class SesopState:
    """Current iterate ``x`` and the iterates before it, most recent last."""

    x: np.ndarray
    accepted: deque = field(default_factory=deque)
    iteration: int = 0
    steps: dict[int, float] = field(default_factory=dict)

    @classmethod
    def start(cls, x0: np.ndarray, history: int) -> SesopState:
        x0 = np.array(x0, dtype=float)
        return cls(x=x0, accepted=deque(maxlen=max(history, 1)))


def initial_guess(n: int, seed: int | None = 0) -> np.ndarray:
    """Uniform random interior values in ``[0, 1)``."""
    return np.random.default_rng(seed).random((n, n))


def _relaxer_for(hier: Hierarchy, level: int, relaxer: Relaxer) -> Relaxer:
    if relaxer.kind is not RelaxationKind.DAMPED_JACOBI:
        return relaxer
    if hier.levels[level].is_linear:
        return replace(relaxer, omega=hier.omegas[level])
    # variational levels carry no matrix diagonal
    return replace(relaxer, kind=RelaxationKind.STEEPEST_DESCENT)


def _minimize(objective: CorrectedObjective, x: np.ndarray, basis: SubspaceBasis, options: SesopOptions):
    basis = basis.pruned()
    if basis.dimension == 0:
        return x
    if objective.is_linear:
        _, x_next = subspace_minimize_quadratic(objective, x, basis)
    else:
        _, x_next = subspace_minimize_newton(objective, x, basis, iters=options.newton_iters)
    return x_next


def _search_direction(objective: CorrectedObjective, x: np.ndarray, options: SesopOptions) -> np.ndarray:
    g = objective.gradient(x)
    return precondition(
        options.preconditioner, g, diagonal=objective.diagonal, split=objective.triangular_split
    )


def coarse_correction_direction(
    hier: Hierarchy, x_fine: np.ndarray, coarse_solution: np.ndarray, *, level: int = 0
) -> np.ndarray:
    """``P (x*_H - R x_h)`` between ``level`` and ``level + 1``."""
    return hier.prolong(level, coarse_solution - hier.restrict(level, x_fine))


def corrected_objective(
    hier: Hierarchy, level: int, x_build: np.ndarray, parent_gradient: np.ndarray
) -> CorrectedObjective:
    """``sigma_level`` built at ``x_build`` from the gradient one level finer."""
    restricted = hier.restrict_gradient(level - 1, parent_gradient)
    term = CoarseCorrectionTerm.at(hier.levels[level], x_build, restricted)
    return CorrectedObjective(hier.levels[level], term)


def solve_coarsest(
    hier: Hierarchy, level: int, sigma: CorrectedObjective, x: np.ndarray, spec: CycleSpec
) -> np.ndarray:
    if sigma.is_linear and spec.coarsest_solver is CoarsestSolver.DIRECT:
        return hier.solve_linear(level, sigma.linear_rhs())
    shape = x.shape

    def fun(z: np.ndarray):
        xz = z.reshape(shape)
        return sigma.objective(xz), sigma.gradient(xz).ravel()

    result = optimize.minimize(
        fun,
        x.ravel(),
        jac=True,
        method="BFGS",
        options={"maxiter": spec.coarsest_max_iter, "gtol": 1e-12},
    )
    candidate = result.x.reshape(shape)
    if not sigma.objective(candidate) <= sigma.objective(x):
        return x
    return candidate


def sesop_mg_coarse_solver(
    hier: Hierarchy,
    level: int,
    x: np.ndarray,
    parent_gradient: np.ndarray,
    options: SesopOptions,
    steps: dict[int, float] | None = None,
) -> np.ndarray:
    """Approximately minimize ``sigma_level`` starting from ``x = R x_parent``."""
    if level < 1:
        raise ValueError(f"coarse levels start at 1, got {level}")
    if level >= hier.depth:
        raise ValueError(f"level {level} exceeds hierarchy depth {hier.depth}")
    steps = {} if steps is None else steps
    sigma = corrected_objective(hier, level, x, parent_gradient)
    return coarse_pass(hier, level, sigma, x, options, steps)


def coarse_pass(
    hier: Hierarchy,
    level: int,
    sigma: CorrectedObjective,
    x: np.ndarray,
    options: SesopOptions,
    steps: dict[int, float],
) -> np.ndarray:
    """One visit of ``level``: relax, ``cycle_type`` child visits, minimize, relax."""
    if hier.is_coarsest(level):
        return solve_coarsest(hier, level, sigma, x, options.cycle)
    relaxer = _relaxer_for(hier, level, options.coarse_relaxer)
    x, steps[level] = relaxer.relax(sigma, x, relaxer.v1, steps.get(level, 0.5))
    directions = []
    if options.use_coarse_correction:
        xc0 = hier.restrict(level, x)
        child = corrected_objective(hier, level + 1, xc0, sigma.gradient(x))
        xc = xc0
        for _ in range(options.cycle.cycle_type):
            xc = coarse_pass(hier, level + 1, child, xc, options, steps)
        directions.append(hier.prolong(level, xc - xc0))
    directions.append(_search_direction(sigma, x, options))
    x = _minimize(sigma, x, SubspaceBasis(directions, 0), options)
    x, steps[level] = relaxer.relax(sigma, x, relaxer.v2, steps.get(level, 0.5))
    return x


def sesop_tg_step(hier: Hierarchy, state: SesopState, options: SesopOptions) -> SesopState:
    """One fine-level SESOP iteration with the (recursive) coarse-grid correction."""
    fine = CorrectedObjective(hier.finest)
    relaxer = _relaxer_for(hier, 0, options.relaxer)
    x, state.steps[0] = relaxer.relax(fine, state.x, relaxer.v1, state.steps.get(0, 0.5))

    directions = []
    if options.use_coarse_correction and hier.depth >= 2:
        xc0 = hier.restrict(0, x)
        xc = sesop_mg_coarse_solver(hier, 1, xc0, fine.gradient(x), options, state.steps)
        directions.append(hier.prolong(0, xc - xc0))
    if options.use_gradient:
        directions.append(_search_direction(fine, x, options))
    directions.extend(history_directions(x, state.accepted, options.history))

    x = _minimize(fine, x, SubspaceBasis(directions, options.history), options)
    x, state.steps[0] = relaxer.relax(fine, x, relaxer.v2, state.steps.get(0, 0.5))

    state.accepted.append(state.x)
    state.x = x
    state.iteration += 1
    return state


@dataclass
class SolveResult:
    x: np.ndarray
    trace: ConvergenceTrace

    def require_converged(self) -> Self:
        if not self.trace.converged:
            raise ConvergenceError(
                f"stopped after {self.trace.iterations} iterations ({self.trace.stop_reason}) "
                f"with {self.trace.metric} {self.trace.last.value:.3e}"
            )
        return self


class SesopSolver:
    """Repeats :func:`sesop_tg_step` until the stopping rule fires."""

    def __init__(self, hier: Hierarchy, options: SesopOptions | None = None, stop: StopRule | None = None):
        self.hier = hier
        self.options = options or SesopOptions()
        self.stop = stop or StopRule()
        if self.options.use_coarse_correction and hier.depth < 2:
            raise ValueError("coarse-grid correction needs at least two levels")

    def solve(self, x0: np.ndarray, *, reference_objective: float | None = None) -> SolveResult:
        monitor = TraceMonitor(self.hier.finest, self.stop, reference_objective)
        state = SesopState.start(x0, self.options.history)
        stopped = monitor.record(0, state.x)
        while not stopped:
            state = sesop_tg_step(self.hier, state, self.options)
            stopped = monitor.record(state.iteration, state.x)
        trace = monitor.trace
        logger.info(
            "SESOP finished after %d iterations (%s, %s=%.3e)",
            trace.iterations,
            trace.stop_reason,
            trace.metric,
            trace.last.value,
        )
        return SolveResult(state.x, trace)
