"""Comparison solvers.

Every solver takes a :class:`~sesop_mg.hierarchy.Hierarchy`, a starting
iterate and a :class:`~sesop_mg.sesop.trace.StopRule`, and reports through the
same :class:`~sesop_mg.sesop.trace.TraceMonitor` as SESOP so iteration counts
and timings are comparable.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
import logging

import numpy as np
from scipy import optimize

from .exceptions import LineSearchError, SolverBreakdown
from .hierarchy import Hierarchy
from .relaxation import sd_sweep
from .sesop.cycles import CycleSpec, SolveResult, corrected_objective, solve_coarsest
from .sesop.objective import CorrectedObjective
from .sesop.trace import StopRule, TraceMonitor

logger = logging.getLogger(__name__)

MAX_LIPSCHITZ_DOUBLINGS = 60


class BaselineKind(str, Enum):
    CLASSICAL_TG = "classical_tg"
    CLASSICAL_MG = "classical_mg"
    CG = "cg"
    PCG_MG = "pcg_mg"
    SD = "sd"
    NESTEROV = "nesterov"
    LBFGS = "lbfgs"


@dataclass(frozen=True)
class BaselineOptions:
    v1: int = 1
    v2: int = 0
    cycle_type: int = 1
    pcg_v1: int = 2
    pcg_v2: int = 1
    lbfgs_memory: int = 10
    coarsest: CycleSpec = field(default_factory=CycleSpec)

    def __post_init__(self) -> None:
        if self.lbfgs_memory < 1:
            raise ValueError(f"lbfgs_memory must be positive, got {self.lbfgs_memory}")
        if self.cycle_type not in (1, 2):
            raise ValueError(f"cycle_type must be 1 or 2, got {self.cycle_type}")


# -- linear multigrid ---------------------------------------------------------


def _jacobi(hier: Hierarchy, level: int, x: np.ndarray, b: np.ndarray, sweeps: int) -> np.ndarray:
    lvl = hier.levels[level]
    diag = lvl.diagonal
    omega = hier.omegas[level]
    for _ in range(sweeps):
        x = x + omega * (b - lvl.hess_apply(x)) / diag
    return x


def linear_mg_cycle(
    hier: Hierarchy, level: int, x: np.ndarray, b: np.ndarray, v1: int, v2: int, cycle_type: int = 1
) -> np.ndarray:
    """Classical correction scheme for ``A x = b`` on ``level``; exact on the coarsest."""
    if hier.is_coarsest(level):
        return hier.solve_linear(level, b)
    x = _jacobi(hier, level, x, b, v1)
    r = b - hier.levels[level].hess_apply(x)
    rc = hier.restrict(level, r)
    ec = np.zeros_like(rc)
    for _ in range(cycle_type):
        ec = linear_mg_cycle(hier, level + 1, ec, rc, v1, v2, cycle_type)
    x = x + hier.prolong(level, ec)
    return _jacobi(hier, level, x, b, v2)


def _require_linear(hier: Hierarchy, name: str) -> None:
    if not hier.is_linear:
        raise ValueError(f"{name} needs a linear problem")


def _run(monitor: TraceMonitor, x: np.ndarray, step: Callable[[np.ndarray], np.ndarray], name: str) -> SolveResult:
    iteration = 0
    stopped = monitor.record(iteration, x)
    while not stopped:
        try:
            x = step(x)
        except LineSearchError as exc:
            monitor.trace.stop_reason = "line_search"
            logger.warning("%s line search failed at iteration %d: %s", name, iteration + 1, exc)
            break
        iteration += 1
        stopped = monitor.record(iteration, x)
    trace = monitor.trace
    logger.info("%s finished after %d iterations (%s)", name, trace.iterations, trace.stop_reason)
    return SolveResult(x, trace)


def classical_mg_solve(
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule | None = None,
    options: BaselineOptions | None = None,
    *,
    reference_objective: float | None = None,
) -> SolveResult:
    """Optimally damped Jacobi plus coarse-grid correction.

    Linear problems run the correction scheme (two levels make the classical
    two-grid method). Variational problems run MG/OPT cycles with
    steepest-descent relaxation and a scalar line search on the correction.
    """
    options = options or BaselineOptions()
    stop = stop or StopRule()
    if hier.depth < 2:
        raise ValueError("classical multigrid needs at least two levels")
    monitor = TraceMonitor(hier.finest, stop, reference_objective)
    if hier.is_linear:
        b = hier.finest.rhs

        def step(x: np.ndarray) -> np.ndarray:
            return linear_mg_cycle(hier, 0, x, b, options.v1, options.v2, options.cycle_type)

        name = "classical TG" if hier.depth == 2 else "classical MG"
    else:
        fine = CorrectedObjective(hier.finest)
        steps: dict[int, float] = {}

        def step(x: np.ndarray) -> np.ndarray:
            return mgopt_cycle(hier, 0, fine, x, options, steps)

        name = "MG/OPT"
    return _run(monitor, np.array(x0, dtype=float), step, name)


def classical_tg_solve(
    hier: Hierarchy, x0: np.ndarray, stop: StopRule | None = None, options: BaselineOptions | None = None
) -> SolveResult:
    _require_linear(hier, "classical two-grid")
    if hier.depth != 2:
        raise ValueError(f"classical two-grid needs exactly two levels, got {hier.depth}")
    return classical_mg_solve(hier, x0, stop, options)


def line_search_correction(objective: CorrectedObjective, x: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Best step along ``d`` in ``[0, 2]``; keeps ``x`` when nothing improves."""
    if not np.any(d):
        return x
    f0 = objective.objective(x)

    def along(t: float) -> float:
        value = objective.objective(x + t * d)
        return value if np.isfinite(value) else np.inf

    result = optimize.minimize_scalar(along, bounds=(0.0, 2.0), method="bounded")
    if result.fun < f0:
        return x + result.x * d
    return x


def mgopt_cycle(
    hier: Hierarchy,
    level: int,
    objective: CorrectedObjective,
    x: np.ndarray,
    options: BaselineOptions,
    steps: dict[int, float],
) -> np.ndarray:
    if hier.is_coarsest(level):
        return solve_coarsest(hier, level, objective, x, options.coarsest)
    for _ in range(options.v1):
        x, steps[level] = sd_sweep(objective, x, steps.get(level, 0.5))
    xc0 = hier.restrict(level, x)
    sigma = corrected_objective(hier, level + 1, xc0, objective.gradient(x))
    xc = xc0
    for _ in range(options.cycle_type):
        xc = mgopt_cycle(hier, level + 1, sigma, xc, options, steps)
    x = line_search_correction(objective, x, hier.prolong(level, xc - xc0))
    for _ in range(options.v2):
        x, steps[level] = sd_sweep(objective, x, steps.get(level, 0.5))
    return x


# -- Krylov -------------------------------------------------------------------


def _pcg(
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule,
    apply_m: Callable[[np.ndarray], np.ndarray],
    name: str,
) -> SolveResult:
    fine = hier.finest
    monitor = TraceMonitor(fine, stop)
    x = np.array(x0, dtype=float)
    r = -fine.gradient(x)
    z = apply_m(r)
    p = z.copy()
    rz = float(np.vdot(r, z))
    iteration = 0
    stopped = monitor.record(iteration, x)
    while not stopped:
        Ap = fine.hess_apply(p)
        pAp = float(np.vdot(p, Ap))
        if pAp <= 0.0:
            raise SolverBreakdown(f"{name}: non-positive curvature p.Ap={pAp:.3e} at iteration {iteration}")
        a = rz / pAp
        x = x + a * p
        r = r - a * Ap
        iteration += 1
        stopped = monitor.record(iteration, x)
        if stopped:
            break
        z = apply_m(r)
        rz_next = float(np.vdot(r, z))
        if rz_next < 0.0:
            raise SolverBreakdown(f"{name}: preconditioner is not positive definite (r.z={rz_next:.3e})")
        p = z + (rz_next / rz) * p
        rz = rz_next
    logger.info("%s finished after %d iterations (%s)", name, iteration, monitor.trace.stop_reason)
    return SolveResult(x, monitor.trace)


def cg_solve(hier: Hierarchy, x0: np.ndarray, stop: StopRule | None = None) -> SolveResult:
    _require_linear(hier, "CG")
    return _pcg(hier, x0, stop or StopRule(), lambda r: r, "CG")


def pcg_mg_solve(
    hier: Hierarchy, x0: np.ndarray, stop: StopRule | None = None, options: BaselineOptions | None = None
) -> SolveResult:
    """CG preconditioned by one classical multigrid cycle from a zero guess."""
    _require_linear(hier, "PCG-MG")
    options = options or BaselineOptions()

    def apply_m(r: np.ndarray) -> np.ndarray:
        return linear_mg_cycle(hier, 0, np.zeros_like(r), r, options.pcg_v1, options.pcg_v2, options.cycle_type)

    return _pcg(hier, x0, stop or StopRule(), apply_m, "PCG-MG")


# -- first-order and quasi-Newton -----------------------------------------------


def sd_solve(
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule | None = None,
    *,
    reference_objective: float | None = None,
) -> SolveResult:
    """Steepest descent: exact steps on quadratics, Armijo backtracking otherwise."""
    fine = CorrectedObjective(hier.finest)
    monitor = TraceMonitor(hier.finest, stop or StopRule(), reference_objective)
    state = {"step": 0.5}

    def step(x: np.ndarray) -> np.ndarray:
        x, state["step"] = sd_sweep(fine, x, state["step"])
        return x

    return _run(monitor, np.array(x0, dtype=float), step, "SD")


def _nesterov_momentum(t: float) -> float:
    return 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))


def _backtracked_gradient_step(level, y: np.ndarray, lipschitz: float) -> tuple[np.ndarray, float]:
    fy = level.objective(y)
    g = level.gradient(y)
    gg = float(np.vdot(g, g))
    for _ in range(MAX_LIPSCHITZ_DOUBLINGS):
        candidate = y - g / lipschitz
        fc = level.objective(candidate)
        if np.isfinite(fc) and fc <= fy - 0.5 * gg / lipschitz:
            return candidate, lipschitz
        lipschitz *= 2.0
    raise LineSearchError(f"Lipschitz estimate exceeded {lipschitz:.3e} without sufficient decrease")


def nesterov_solve(
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule | None = None,
    *,
    reference_objective: float | None = None,
    initial_lipschitz: float = 1.0,
) -> SolveResult:
    """Accelerated gradient with the ``t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`` momentum.

    The momentum restarts whenever the extrapolated step would increase the
    objective, in which case a plain gradient step from the current iterate
    is taken instead.
    """
    level = hier.finest
    monitor = TraceMonitor(level, stop or StopRule(), reference_objective)
    state = {"t": 1.0, "L": initial_lipschitz, "y": np.array(x0, dtype=float)}

    def step(x: np.ndarray) -> np.ndarray:
        L = max(state["L"] * 0.5, 1e-12)
        x_next, L = _backtracked_gradient_step(level, state["y"], L)
        if level.objective(x_next) > level.objective(x):
            logger.debug("Nesterov restart")
            x_next, L = _backtracked_gradient_step(level, x, L)
            state["t"] = 1.0
        t_next = _nesterov_momentum(state["t"])
        state["y"] = x_next + ((state["t"] - 1.0) / t_next) * (x_next - x)
        state["t"], state["L"] = t_next, L
        return x_next

    return _run(monitor, state["y"].copy(), step, "Nesterov")


def lbfgs_solve(
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule | None = None,
    options: BaselineOptions | None = None,
    *,
    reference_objective: float | None = None,
) -> SolveResult:
    """scipy's L-BFGS-B without bounds; the shared monitor stops it from the callback."""
    options = options or BaselineOptions()
    stop = stop or StopRule()
    level = hier.finest
    monitor = TraceMonitor(level, stop, reference_objective)
    x = np.array(x0, dtype=float)
    shape = x.shape
    if monitor.record(0, x):
        return SolveResult(x, monitor.trace)
    latest = {"x": x, "k": 0}

    def fun(z: np.ndarray):
        xz = z.reshape(shape)
        return level.objective(xz), level.gradient(xz).ravel()

    def callback(intermediate_result: optimize.OptimizeResult) -> None:
        latest["k"] += 1
        latest["x"] = intermediate_result.x.reshape(shape).copy()
        if monitor.record(latest["k"], latest["x"]):
            raise StopIteration

    result = optimize.minimize(
        fun,
        x.ravel(),
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxcor": options.lbfgs_memory,
            "maxiter": stop.max_iter,
            "maxfun": 50 * max(stop.max_iter, 1),
            "ftol": 0.0,
            "gtol": 0.0,
        },
    )
    if not monitor.trace.stop_reason:
        monitor.trace.stop_reason = "line_search"
        logger.warning("L-BFGS stopped early: %s", result.message)
    logger.info("L-BFGS finished after %d iterations (%s)", monitor.trace.iterations, monitor.trace.stop_reason)
    return SolveResult(latest["x"], monitor.trace)


def run_baseline(
    kind: BaselineKind | str,
    hier: Hierarchy,
    x0: np.ndarray,
    stop: StopRule | None = None,
    options: BaselineOptions | None = None,
    *,
    reference_objective: float | None = None,
) -> SolveResult:
    kind = BaselineKind(kind)
    if kind is BaselineKind.CLASSICAL_TG:
        return classical_tg_solve(hier, x0, stop, options)
    if kind is BaselineKind.CLASSICAL_MG:
        return classical_mg_solve(hier, x0, stop, options, reference_objective=reference_objective)
    if kind is BaselineKind.CG:
        return cg_solve(hier, x0, stop)
    if kind is BaselineKind.PCG_MG:
        return pcg_mg_solve(hier, x0, stop, options)
    if kind is BaselineKind.SD:
        return sd_solve(hier, x0, stop, reference_objective=reference_objective)
    if kind is BaselineKind.NESTEROV:
        return nesterov_solve(hier, x0, stop, reference_objective=reference_objective)
    return lbfgs_solve(hier, x0, stop, options, reference_objective=reference_objective)

