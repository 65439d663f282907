"""Tests for sesop_mg.baselines."""

from __future__ import annotations

import numpy as np
import pytest

from sesop_mg.baselines import (
    BaselineKind,
    BaselineOptions,
    cg_solve,
    classical_mg_solve,
    classical_tg_solve,
    line_search_correction,
    linear_mg_cycle,
    nesterov_solve,
    pcg_mg_solve,
    run_baseline,
    sd_solve,
)
from sesop_mg.exceptions import SolverBreakdown
from sesop_mg.hierarchy import build_linear_hierarchy, build_nonlinear_hierarchy
from sesop_mg.problems import ExpVariationalProblem, PLaplacianProblem, RotatedAnisotropicProblem
from sesop_mg.sesop.cycles import initial_guess
from sesop_mg.sesop.objective import CorrectedObjective
from sesop_mg.sesop.trace import StopRule, estimate_practical_factor

LAPLACE = RotatedAnisotropicProblem(1.0, 0.0)


@pytest.fixture(scope="module")
def laplace_mg():
    return build_linear_hierarchy(LAPLACE, 31, 7)


@pytest.fixture(scope="module")
def exp_mg():
    return build_nonlinear_hierarchy(ExpVariationalProblem(), 31, 7)


@pytest.mark.parametrize("kwargs", [{"lbfgs_memory": 0}, {"cycle_type": 0}])
def test_options_validation(kwargs):
    with pytest.raises(ValueError):
        BaselineOptions(**kwargs)


class TestLinear:
    def test_mg_cycle_on_coarsest_is_exact(self, laplace_mg):
        rhs = np.ones((7, 7))
        x = linear_mg_cycle(laplace_mg, 2, np.zeros((7, 7)), rhs, 1, 1)
        np.testing.assert_allclose(laplace_mg.levels[2].hess_apply(x), rhs, atol=1e-9)

    def test_classical_tg_factor(self):
        hier = build_linear_hierarchy(LAPLACE, 63, 31)
        result = classical_tg_solve(hier, initial_guess(63), StopRule(max_iter=200), BaselineOptions(v1=1, v2=0))
        result.require_converged()
        assert estimate_practical_factor(result.trace) == pytest.approx(0.594, abs=0.02)

    def test_classical_tg_needs_two_levels(self, laplace_mg):
        with pytest.raises(ValueError, match="exactly two levels"):
            classical_tg_solve(laplace_mg, initial_guess(31))

    def test_w_cycle_not_slower_than_v_cycle(self, laplace_mg):
        x0 = initial_guess(31)
        stop = StopRule(max_iter=100)
        v = classical_mg_solve(laplace_mg, x0, stop, BaselineOptions(v1=2, v2=1))
        w = classical_mg_solve(laplace_mg, x0, stop, BaselineOptions(v1=2, v2=1, cycle_type=2))
        assert v.trace.converged and w.trace.converged
        assert w.trace.iterations <= v.trace.iterations

    def test_pcg_mg_beats_cg(self, laplace_mg):
        x0 = initial_guess(31)
        stop = StopRule(max_iter=600)
        cg = cg_solve(laplace_mg, x0, stop)
        pcg = pcg_mg_solve(laplace_mg, x0, stop)
        assert cg.trace.converged and pcg.trace.converged
        assert pcg.trace.iterations < cg.trace.iterations / 3

    def test_cg_breaks_down_on_indefinite_matrix(self, laplace_mg, mocker):
        mocker.patch.object(type(laplace_mg.finest), "hess_apply", lambda self, p: -p)
        with pytest.raises(SolverBreakdown, match="curvature"):
            cg_solve(laplace_mg, initial_guess(31))

    def test_krylov_rejects_nonlinear(self, exp_mg):
        with pytest.raises(ValueError, match="linear problem"):
            cg_solve(exp_mg, initial_guess(31))


class TestVariational:
    def test_line_search_keeps_iterate_without_improvement(self, exp_mg):
        objective = CorrectedObjective(exp_mg.finest)
        x = initial_guess(31)
        uphill = objective.gradient(x)
        np.testing.assert_array_equal(line_search_correction(objective, x, uphill * 1e6), x)
        np.testing.assert_array_equal(line_search_correction(objective, x, np.zeros_like(x)), x)

    def test_line_search_improves_along_descent(self, exp_mg):
        objective = CorrectedObjective(exp_mg.finest)
        x = initial_guess(31)
        x_next = line_search_correction(objective, x, -1e-3 * objective.gradient(x))
        assert objective.objective(x_next) < objective.objective(x)

    @pytest.mark.parametrize("kind", [k for k in BaselineKind if k.value not in {"cg", "pcg_mg", "classical_tg"}])
    def test_first_order_and_multigrid_decrease_gap(self, exp_mg, kind):
        prob = ExpVariationalProblem()
        x0 = initial_guess(31)
        result = run_baseline(
            kind, exp_mg, x0, StopRule(max_iter=15), reference_objective=prob.reference_objective(31)
        )
        values = result.trace.values()
        assert result.trace.metric == "gap"
        assert values[-1] < values[0]

    def test_sd_is_monotone(self):
        prob = PLaplacianProblem(p=1.6)
        hier = build_nonlinear_hierarchy(prob, 15, 7)
        result = sd_solve(hier, initial_guess(15), StopRule(max_iter=20))
        objectives = np.array([r.objective for r in result.trace.records])
        assert np.all(np.diff(objectives) <= 0.0)

    def test_nesterov_restart_keeps_descent(self, exp_mg):
        result = nesterov_solve(exp_mg, initial_guess(31), StopRule(max_iter=25))
        objectives = np.array([r.objective for r in result.trace.records])
        assert objectives[-1] < objectives[0]
        assert result.trace.stop_reason == "max_iter"

    def test_lbfgs_respects_max_iter(self, exp_mg):
        result = run_baseline("lbfgs", exp_mg, initial_guess(31), StopRule(max_iter=5))
        assert result.trace.iterations <= 5
        assert result.trace.stop_reason in {"max_iter", "line_search", "tolerance"}
