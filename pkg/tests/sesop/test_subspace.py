"""Tests for sesop_mg.sesop.subspace."""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest
from scipy import optimize, sparse

from sesop_mg.grid import GridField
from sesop_mg.problems import PLaplacianProblem, ProblemLevel, RotatedAnisotropicProblem
from sesop_mg.sesop.objective import CorrectedObjective
from sesop_mg.sesop.subspace import (
    SubspaceBasis,
    history_directions,
    subspace_minimize_newton,
    subspace_minimize_quadratic,
)


@pytest.fixture
def spd_level():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((16, 16))
    A = M @ M.T + 16 * np.eye(16)
    return ProblemLevel.quadratic(sparse.csr_matrix(A), rng.standard_normal(16), 4)


class TestSubspaceBasis:
    def test_pruned_drops_zero_and_nonfinite(self):
        good = np.ones((3, 3))
        bad = np.full((3, 3), np.nan)
        basis = SubspaceBasis([good, np.zeros((3, 3)), bad], history=1).pruned()
        assert basis.dimension == 1
        assert basis.history == 1
        assert basis.matrix().shape == (9, 1)

    def test_accepts_grid_fields(self):
        basis = SubspaceBasis([GridField(np.ones((3, 3)), 0.25)])
        assert isinstance(basis.directions[0], np.ndarray)

    def test_negative_history(self):
        with pytest.raises(ValueError, match="nonnegative"):
            SubspaceBasis([], history=-1)


class TestQuadratic:
    def test_gradient_orthogonal_to_subspace(self, spd_level):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((4, 4))
        dirs = [rng.standard_normal((4, 4)) for _ in range(3)]
        alpha, x_next = subspace_minimize_quadratic(spd_level, x, SubspaceBasis(dirs))
        g = spd_level.gradient(x_next).ravel()
        P = SubspaceBasis(dirs).matrix()
        np.testing.assert_allclose(P.T @ g, 0.0, atol=1e-9)
        np.testing.assert_allclose(x_next, x + (P @ alpha).reshape(4, 4), atol=1e-12)

    def test_matches_general_minimizer(self, spd_level):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((4, 4))
        dirs = [rng.standard_normal((4, 4)) for _ in range(2)]
        P = SubspaceBasis(dirs).matrix()
        _, x_next = subspace_minimize_quadratic(spd_level, x, SubspaceBasis(dirs))
        best = optimize.minimize(
            lambda a: spd_level.objective(x + (P @ a).reshape(4, 4)),
            np.zeros(2),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12},
        )
        assert spd_level.objective(x_next) <= best.fun + 1e-8

    def test_linearly_dependent_directions(self, spd_level):
        x = np.zeros((4, 4))
        d = np.random.default_rng(7).standard_normal((4, 4))
        _, x_two = subspace_minimize_quadratic(spd_level, x, SubspaceBasis([d, 2.0 * d]))
        _, x_one = subspace_minimize_quadratic(spd_level, x, SubspaceBasis([d]))
        np.testing.assert_allclose(x_two, x_one, atol=1e-10)

    def test_keeps_grid_field_type(self):
        level = RotatedAnisotropicProblem(1.0, 0.0).level(7)
        x = GridField(np.ones((7, 7)), level.h)
        _, x_next = subspace_minimize_quadratic(level, x, SubspaceBasis([-level.gradient(x.values)]))
        assert isinstance(x_next, GridField)
        assert level.objective(x_next.values) < level.objective(x.values)

    def test_empty_after_pruning(self, spd_level):
        with pytest.raises(ValueError, match="empty after pruning"):
            subspace_minimize_quadratic(spd_level, np.zeros((4, 4)), SubspaceBasis([np.zeros((4, 4))]))

    def test_nonlinear_level_rejected(self):
        level = PLaplacianProblem(p=1.5).level(7)
        with pytest.raises(ValueError, match="needs a linear level"):
            subspace_minimize_quadratic(level, np.zeros((7, 7)), SubspaceBasis([np.ones((7, 7))]))


class TestNewton:
    def test_one_direction_matches_scalar_search(self):
        level = PLaplacianProblem(p=1.5).level(15)
        x = np.random.default_rng(8).random((15, 15))
        d = -level.gradient(x)
        _, x_next = subspace_minimize_newton(level, x, SubspaceBasis([d]), iters=30)
        best = optimize.minimize_scalar(lambda t: level.objective(x + t * d))
        assert level.objective(x_next) <= best.fun + 1e-8 * abs(best.fun)

    def test_never_increases_objective(self):
        level = PLaplacianProblem(p=1.3).level(15)
        rng = np.random.default_rng(9)
        x = rng.random((15, 15))
        dirs = [rng.standard_normal((15, 15)) for _ in range(3)]
        _, x_next = subspace_minimize_newton(level, x, SubspaceBasis(dirs), iters=5)
        assert level.objective(x_next) <= level.objective(x)

    def test_agrees_with_quadratic_on_linear_level(self, spd_level):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((4, 4))
        dirs = [rng.standard_normal((4, 4)) for _ in range(2)]
        _, exact = subspace_minimize_quadratic(spd_level, x, SubspaceBasis(dirs))
        _, newton = subspace_minimize_newton(spd_level, x, SubspaceBasis(dirs))
        np.testing.assert_allclose(newton, exact, atol=1e-6)

    def test_corrected_objective_accepted(self):
        level = PLaplacianProblem(p=1.5).level(7)
        x = np.full((7, 7), 0.5)
        _, x_next = subspace_minimize_newton(CorrectedObjective(level), x, SubspaceBasis([-level.gradient(x)]))
        assert level.objective(x_next) < level.objective(x)

    def test_empty_basis_keeps_iterate(self):
        level = PLaplacianProblem(p=1.5).level(7)
        x = np.ones((7, 7))
        beta, x_next = subspace_minimize_newton(level, x, SubspaceBasis([np.zeros((7, 7))]))
        assert beta.size == 0
        np.testing.assert_array_equal(x_next, x)


def test_history_directions_most_recent_first():
    x0, x1, x2 = (np.full((2, 2), v) for v in (0.0, 1.0, 3.0))
    accepted = deque([x0, x1], maxlen=2)
    dirs = history_directions(x2, accepted, 2)
    np.testing.assert_array_equal(dirs[0], x2 - x1)
    np.testing.assert_array_equal(dirs[1], x1 - x0)
    assert len(history_directions(x2, accepted, 5)) == 2
    assert history_directions(x2, deque(), 3) == []
    assert history_directions(x2, accepted, 0) == []
