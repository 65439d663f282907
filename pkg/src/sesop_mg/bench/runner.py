"""Turns experiment configurations into solver runs and reports."""

from __future__ import annotations

import logging
import math
from pathlib import Path

from ..analysis.lfa import fixed_step_factor, h_ellipticity, ideal_factors, minimize_kappa, ordinary_coefficients
from ..analysis.tg import FixedCoefficients, check_history_supported
from ..baselines import BaselineKind, BaselineOptions, run_baseline
from ..config import CoefficientMode, ExperimentConfig, ProblemKind, ProblemSpec, SolverKind
from ..hierarchy import Hierarchy, build_hierarchy
from ..problems import ExpVariationalProblem, PLaplacianProblem, Problem, RotatedAnisotropicProblem
from ..relaxation import Relaxer
from ..sesop.cycles import CycleSpec, SesopOptions, SesopSolver, SolveResult, initial_guess
from ..sesop.fixed_step import FixedStepSolver
from ..sesop.trace import ConvergenceTrace, StopRule, estimate_practical_factor
from ..validator import check_gradient
from .output import emit_plotdata, write_report
from .presets import Suite, SuiteEntry
from .report import RunReport
from .worker_pool import run_all

logger = logging.getLogger(__name__)


def build_problem(spec: ProblemSpec) -> Problem:
    if spec.kind is ProblemKind.ANISOTROPIC:
        return RotatedAnisotropicProblem(epsilon=spec.epsilon, phi=spec.phi)
    if spec.kind is ProblemKind.EXPONENTIAL:
        return ExpVariationalProblem(gamma=spec.gamma)
    return PLaplacianProblem(p=spec.p, xi=spec.xi)


def build_experiment_hierarchy(cfg: ExperimentConfig, problem: Problem | None = None) -> Hierarchy:
    problem = problem or build_problem(cfg.problem)
    s = cfg.solver
    return build_hierarchy(
        problem,
        cfg.grid.fine_n,
        cfg.grid.coarsest_n,
        prolongation=s.prolongation,
        coarse_mode=s.coarse_mode,
        omega_mode=s.omega_mode,
    )


def sesop_options(cfg: ExperimentConfig) -> SesopOptions:
    s = cfg.solver
    return SesopOptions(
        history=s.history,
        preconditioner=s.preconditioner,
        relaxer=Relaxer(kind=s.relaxation, v1=s.v1, v2=s.v2),
        coarse_relaxer=Relaxer(kind=s.relaxation, v1=s.coarse_v1, v2=s.coarse_v2),
        cycle=CycleSpec(
            cycle_type=s.cycle_type,
            coarsest_solver=s.coarsest_solver,
            coarsest_max_iter=s.coarsest_max_iter,
        ),
        use_coarse_correction=s.use_coarse_correction,
        newton_iters=s.newton_iters,
    )


def baseline_options(cfg: ExperimentConfig) -> BaselineOptions:
    s = cfg.solver
    return BaselineOptions(
        v1=s.v1,
        v2=s.v2,
        cycle_type=s.cycle_type,
        pcg_v1=s.coarse_v1,
        pcg_v2=s.coarse_v2,
        lbfgs_memory=s.lbfgs_memory,
        coarsest=CycleSpec(coarsest_solver=s.coarsest_solver, coarsest_max_iter=s.coarsest_max_iter),
    )


def stop_rule(cfg: ExperimentConfig) -> StopRule:
    st = cfg.stop
    return StopRule(tol=st.tol, gap_tol=st.gap_tol, max_iter=st.max_iter, max_seconds=st.max_seconds)


def analysis_operator(cfg: ExperimentConfig):
    problem = build_problem(cfg.problem)
    if not problem.is_linear:
        raise ValueError("Fourier analysis needs the anisotropic (linear) problem")
    return problem.stencil(cfg.analysis_n - 1)


def determine_coefficients(cfg: ExperimentConfig, m: int | None = None) -> FixedCoefficients:
    """Fixed stepsizes from the Fourier analysis on an ``m``-point frequency grid."""
    m = m or cfg.analysis_n
    s = cfg.solver
    check_history_supported(s.history)
    op = analysis_operator(cfg)
    with_history = s.history >= 1
    if cfg.coefficient_mode is CoefficientMode.FIXED_ORDINARY:
        return ordinary_coefficients(op, s.prolongation, s.coarse_mode, m, with_history=with_history)
    if cfg.coefficient_mode is CoefficientMode.FIXED_OPTIMIZED:
        return minimize_kappa(op, s.prolongation, s.coarse_mode, m, with_history=with_history).coefficients
    raise ValueError("subspace minimization has no fixed coefficients")


def measured_factor(trace: ConvergenceTrace) -> float | None:
    if not trace.converged or len(trace.records) < 11:
        return None
    try:
        return estimate_practical_factor(trace)
    except ValueError:
        return None


def _solve(cfg: ExperimentConfig, hier: Hierarchy, problem: Problem, coefficients: FixedCoefficients | None) -> SolveResult:
    s = cfg.solver
    stop = stop_rule(cfg)
    x0 = initial_guess(cfg.grid.fine_n, cfg.seed)
    reference = None if problem.is_linear else problem.reference_objective(cfg.grid.fine_n)
    if s.kind is SolverKind.SESOP:
        return SesopSolver(hier, sesop_options(cfg), stop).solve(x0, reference_objective=reference)
    if s.kind is SolverKind.FIXED:
        options = sesop_options(cfg) if s.multilevel_correction else None
        solver = FixedStepSolver(hier, coefficients, stop, preconditioner=s.preconditioner, options=options)
        return solver.solve(x0)
    return run_baseline(
        BaselineKind(s.kind.value), hier, x0, stop, baseline_options(cfg), reference_objective=reference
    )


def run_experiment(
    cfg: ExperimentConfig, *, label: str | None = None, write: bool = True, strict: bool = False
) -> RunReport:
    """Solve one configuration; writes ``<label>.csv`` and ``<label>.json`` when ``cfg.output`` is set.

    With ``strict`` an unconverged run raises :class:`~sesop_mg.exceptions.ConvergenceError`
    after its report has been written.
    """
    problem = build_problem(cfg.problem)
    hier = build_experiment_hierarchy(cfg, problem)
    coefficients = None
    if cfg.coefficient_mode is not CoefficientMode.SUBSPACE:
        coefficients = determine_coefficients(cfg)
    result = _solve(cfg, hier, problem, coefficients)
    report = RunReport(
        label=label or cfg.name,
        config=cfg.as_dict(),
        trace=result.trace,
        measured_factor=measured_factor(result.trace),
        predicted_factor=coefficients.predicted_factor if coefficients else None,
        coefficients=coefficients.as_dict() if coefficients else None,
        extra={
            "solver": cfg.solver.kind.value,
            "iterations": result.trace.iterations,
            "stop_reason": result.trace.stop_reason,
            "final_value": result.trace.last.value,
        },
    )
    logger.info(
        "%s: %d iterations, measured factor %s",
        report.label,
        result.trace.iterations,
        "n/a" if report.measured_factor is None else f"{report.measured_factor:.4f}",
    )
    if not result.trace.converged:
        logger.warning("%s: stopped without converging (%s)", report.label, result.trace.stop_reason)
    if write and cfg.output:
        write_report(report, Path(cfg.output))
    if strict:
        result.require_converged()
    return report


def analyze(cfg: ExperimentConfig) -> RunReport:
    """Fourier-analysis summary (linear) or gradient check (nonlinear); no solve."""
    problem = build_problem(cfg.problem)
    extra: dict = {}
    predicted = None
    coefficients = None
    if problem.is_linear:
        op = analysis_operator(cfg)
        s = cfg.solver
        m = cfg.analysis_n
        ideal_no_history, ideal_history = ideal_factors(op, m)
        ordinary = ordinary_coefficients(op, s.prolongation, s.coarse_mode, m)
        optimum = minimize_kappa(op, s.prolongation, s.coarse_mode, m, with_history=s.history >= 1)
        extra.update(
            h_ellipticity=h_ellipticity(op, m),
            ideal_factor=ideal_no_history,
            ideal_factor_with_history=ideal_history,
            ordinary_factor=ordinary.predicted_factor,
            optimal_alpha=optimum.alpha,
            optimal_kappa=optimum.kappa,
            ordinary_coefficients=ordinary.as_dict(),
        )
        coefficients = optimum.coefficients.as_dict()
        predicted = optimum.predicted_factor
    else:
        level = problem.level(cfg.grid.fine_n)
        x = initial_guess(cfg.grid.fine_n, cfg.seed)
        check = check_gradient(level.objective, level.gradient, x, seed=cfg.seed)
        extra.update(gradient_check=check.as_dict(), reference_objective=problem.reference_objective(cfg.grid.fine_n))
    report = RunReport(
        label=f"{cfg.name}-analysis",
        config=cfg.as_dict(),
        predicted_factor=predicted,
        coefficients=coefficients,
        extra=extra,
    )
    if cfg.output:
        write_report(report, Path(cfg.output))
    return report


def run_table2(cfg: ExperimentConfig, *, reference: dict[str, float] | None = None) -> RunReport:
    """Ordinary, SESOP and optimized factors for one anisotropic setting.

    The SESOP column is measured with Dirichlet boundaries; the other two are
    Fourier predictions.
    """
    s = cfg.solver
    op = analysis_operator(cfg)
    m = cfg.analysis_n
    ordinary = ordinary_coefficients(op, s.prolongation, s.coarse_mode, m)
    optimum = minimize_kappa(op, s.prolongation, s.coarse_mode, m)
    sesop_cfg = cfg.with_overrides({"solver": {"kind": "sesop", "history": 1}, "coefficient_mode": "subspace"})
    sesop = run_experiment(sesop_cfg, label=f"{cfg.name}-sesop", write=False)
    _, ideal = ideal_factors(op, m)
    report = RunReport(
        label=cfg.name,
        config=cfg.as_dict(),
        trace=sesop.trace,
        measured_factor=sesop.measured_factor,
        predicted_factor=optimum.predicted_factor,
        coefficients=optimum.coefficients.as_dict(),
        extra={
            "ordinary": ordinary.predicted_factor,
            "sesop": sesop.measured_factor,
            "optimized": optimum.predicted_factor,
            "ideal": ideal,
            "prolongation": s.prolongation.value,
        },
    )
    if reference:
        report.extra.update({f"reference_{k}": v for k, v in reference.items()})
    return report


def r_ratio(target_factor: float, num_factor: float) -> float:
    """``log r_target / log r_num - 1``."""
    if not (0.0 < target_factor < 1.0 and 0.0 < num_factor < 1.0):
        raise ValueError(f"factors must lie in (0, 1), got {target_factor} and {num_factor}")
    return math.log(target_factor) / math.log(num_factor) - 1.0


def run_rratio_sweep(cfg: ExperimentConfig, target: int, nums: list[int]) -> list[RunReport]:
    """Stepsizes optimized on ``Num``-point frequency grids, evaluated on ``target``."""
    s = cfg.solver
    op = analysis_operator(cfg)

    def factor_on_target(m: int) -> float:
        coeffs = minimize_kappa(op, s.prolongation, s.coarse_mode, m).coefficients
        return fixed_step_factor(op, s.prolongation, s.coarse_mode, coeffs, target)

    target_factor = factor_on_target(target)
    reports = []
    for num in nums:
        num_factor = target_factor if num == target else factor_on_target(num)
        ratio = r_ratio(target_factor, num_factor)
        logger.debug("r_ratio(%d) = %.4f", num, ratio)
        reports.append(
            RunReport(
                label=f"{cfg.name}-num{num}",
                config=cfg.as_dict(),
                predicted_factor=num_factor,
                r_ratio=ratio,
                extra={"num": num, "target": target, "target_factor": target_factor},
            )
        )
    return reports


def _run_entry(entry: SuiteEntry) -> RunReport:
    report = run_experiment(entry.config, label=entry.label)
    report.reference = entry.reference
    return report


def _table2_entry(entry: SuiteEntry) -> RunReport:
    return run_table2(entry.config, reference=entry.reference)


def run_suite(suite: Suite, *, workers: int | None = None) -> list[RunReport]:
    """Run every entry of a suite and write the plot data next to the per-run files."""
    logger.info("suite %s: %d entries (%s)", suite.name, len(suite.entries), suite.kind)
    if suite.kind == "runs":
        reports = run_all(_run_entry, suite.entries, workers)
    elif suite.kind == "table2":
        reports = run_all(_table2_entry, suite.entries, workers)
    else:
        reports = []
        for entry in suite.entries:
            for report in run_rratio_sweep(entry.config, suite.target, suite.nums):
                report.label = f"{entry.label}-num{report.extra['num']}"
                reports.append(report)
    output = suite.entries[0].config.output if suite.entries else None
    if output:
        emit_plotdata(reports, output, summary_name=suite.name)
    return reports
