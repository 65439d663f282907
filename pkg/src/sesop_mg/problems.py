"""Benchmark problems: rotated anisotropic diffusion and two variational problems.

Every problem hands out a :class:`ProblemLevel` per grid size. Linear levels
minimize ``0.5 x^T A x - f^T x`` with ``A`` symmetric positive definite (the
negated discrete operator). The variational levels use cell-based forward
differences with quadrature weight ``h**2``, and their gradients are derived
exactly from the discrete functional.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace
from functools import cached_property
import logging
import math

import numpy as np
from scipy import sparse

from .grid import GridField, StencilOp, grid_coordinates, mesh_size
from .relaxation import TriangularSplit

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProblemLevel:
    """Objective and gradient of one discretization level.

    ``objective`` and ``gradient`` take and return ``(n, n)`` arrays.
    """

    n: int
    objective: Callable[[np.ndarray], float]
    gradient: ArrayFn
    name: str = "level"
    matrix: sparse.csr_matrix | None = None
    rhs: np.ndarray | None = None
    linear_stencil: StencilOp | None = None

    @property
    def h(self) -> float:
        return mesh_size(self.n)

    @property
    def is_linear(self) -> bool:
        return self.matrix is not None

    @property
    def diagonal(self) -> np.ndarray | None:
        if self.matrix is None:
            return None
        return np.asarray(self.matrix.diagonal()).reshape(self.n, self.n)

    @cached_property
    def triangular_split(self) -> TriangularSplit | None:
        """Symmetric Gauss-Seidel triangles, split on first use."""
        if self.matrix is None:
            return None
        return TriangularSplit.of(self.matrix)

    def hess_apply(self, p: np.ndarray) -> np.ndarray:
        if self.matrix is None:
            raise ValueError(f"{self.name} has no matrix")
        return (self.matrix @ p.ravel()).reshape(p.shape)

    def with_rhs(self, rhs: np.ndarray) -> ProblemLevel:
        if self.matrix is None:
            raise ValueError(f"{self.name} is not linear")
        return ProblemLevel.quadratic(
            self.matrix, rhs, self.n, name=self.name, stencil=self.linear_stencil
        )

    def objective_field(self, u: GridField) -> float:
        self._check(u)
        return self.objective(u.values)

    def gradient_field(self, u: GridField) -> GridField:
        self._check(u)
        return GridField(self.gradient(u.values), u.h)

    def _check(self, u: GridField) -> None:
        if u.n != self.n:
            raise ValueError(f"size mismatch: level has n={self.n}, field has n={u.n}")

    @classmethod
    def quadratic(
        cls,
        matrix: sparse.spmatrix,
        rhs: np.ndarray | None,
        n: int,
        *,
        name: str = "quadratic",
        stencil: StencilOp | None = None,
    ) -> ProblemLevel:
        A = sparse.csr_matrix(matrix)
        f = np.zeros((n, n)) if rhs is None else np.asarray(rhs, dtype=float).reshape(n, n)

        def objective(x: np.ndarray) -> float:
            xv = x.ravel()
            return float(0.5 * xv @ (A @ xv) - f.ravel() @ xv)

        def gradient(x: np.ndarray) -> np.ndarray:
            return (A @ x.ravel()).reshape(n, n) - f

        return cls(
            n=n,
            objective=objective,
            gradient=gradient,
            name=name,
            matrix=A,
            rhs=f,
            linear_stencil=stencil,
        )


def rotated_stencil(epsilon: float, phi: float, h: float) -> StencilOp:
    """SPD-normalized stencil of ``-(u_ss + epsilon u_tt)`` along angle ``phi``."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    c, s = math.cos(phi), math.sin(phi)
    cross = 0.5 * (1.0 - epsilon) * c * s
    w = np.zeros((3, 3))
    w[1, 1] = 2.0 * (1.0 + epsilon)
    w[0, 1] = w[2, 1] = -(c * c + epsilon * s * s)
    w[1, 0] = w[1, 2] = -(epsilon * c * c + s * s)
    w[2, 2] = w[0, 0] = -cross
    w[2, 0] = w[0, 2] = cross
    return StencilOp(w, h)


def laplacian_stencil(h: float) -> StencilOp:
    return rotated_stencil(1.0, 0.0, h)


@dataclass(frozen=True)
class RotatedAnisotropicProblem:
    """``-(u_ss + epsilon u_tt) = f`` on the unit square, zero boundary.

    ``source`` defaults to zero, so the discrete solution is zero and the
    iterate is the error.
    """

    epsilon: float
    phi: float
    source: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def is_linear(self) -> bool:
        return True

    def stencil(self, n: int) -> StencilOp:
        return rotated_stencil(self.epsilon, self.phi, mesh_size(n))

    def rhs(self, n: int) -> np.ndarray:
        if self.source is None:
            return np.zeros((n, n))
        x, y = grid_coordinates(n)
        return np.asarray(self.source(x, y), dtype=float)

    def level(self, n: int) -> ProblemLevel:
        op = self.stencil(n)
        return ProblemLevel.quadratic(
            op.sparse_matrix(n),
            self.rhs(n),
            n,
            name=f"rotated(eps={self.epsilon:g}, phi={self.phi:.4f}, n={n})",
            stencil=op,
        )


def _padded(u: np.ndarray) -> np.ndarray:
    return np.pad(u, 1)


def _analytic_profile(x, y):
    return (x**2 - x**3) * np.sin(3 * np.pi * y)


def exp_source(x, y, gamma: float):
    """Source term for which ``(x^2 - x^3) sin(3 pi y)`` solves problem I."""
    a = x**2 - x**3
    return ((9 * np.pi**2 + gamma * np.exp(a * np.sin(3 * np.pi * y))) * a + 6 * x - 2) * np.sin(
        3 * np.pi * y
    )


def _dirichlet_energy(u: np.ndarray, h: float) -> float:
    U = _padded(u)
    ux = np.diff(U, axis=0)
    uy = np.diff(U, axis=1)
    return 0.5 * (np.sum(ux * ux) + np.sum(uy * uy))


def _neg_laplacian(u: np.ndarray, h: float) -> np.ndarray:
    U = _padded(u)
    return (4.0 * u - U[:-2, 1:-1] - U[2:, 1:-1] - U[1:-1, :-2] - U[1:-1, 2:]) / h**2


@dataclass(frozen=True)
class ExpVariationalProblem:
    """``int 0.5|grad u|^2 + gamma (u e^u - e^u) - f u`` with a known minimizer."""

    gamma: float = 10.0
    has_exact_solution: bool = field(default=True, init=False)

    @property
    def is_linear(self) -> bool:
        return False

    def source(self, n: int) -> np.ndarray:
        x, y = grid_coordinates(n)
        return exp_source(x, y, self.gamma)

    def exact_solution(self, n: int) -> np.ndarray:
        x, y = grid_coordinates(n)
        return _analytic_profile(x, y)

    def level(self, n: int) -> ProblemLevel:
        h = mesh_size(n)
        f = self.source(n)
        gamma = self.gamma
        # boundary nodes carry u = 0; trapezoid weights make the quadrature exact for constants
        boundary_const = -gamma * (1.0 - (n * h) ** 2)

        def objective(u: np.ndarray) -> float:
            eu = np.exp(u)
            potential = np.sum(gamma * (u * eu - eu) - f * u)
            return float(_dirichlet_energy(u, h) + h * h * potential + boundary_const)

        def gradient(u: np.ndarray) -> np.ndarray:
            return h * h * (_neg_laplacian(u, h) + gamma * u * np.exp(u) - f)

        return ProblemLevel(n=n, objective=objective, gradient=gradient, name=f"exp(gamma={gamma:g}, n={n})")

    def reference_objective(self, n: int) -> float:
        return self.level(n).objective(self.exact_solution(n))


def exp_objective(prob: ExpVariationalProblem, u: GridField) -> float:
    return prob.level(u.n).objective_field(u)


def exp_gradient(prob: ExpVariationalProblem, u: GridField) -> GridField:
    return prob.level(u.n).gradient_field(u)


def _plap_source(x, y, p: float, xi: float):
    """``-div(p (|grad u|^2 + xi^2)^((p-2)/2) grad u)`` for the target profile."""
    a = x**2 - x**3
    da = 2 * x - 3 * x**2
    dda = 2 - 6 * x
    s3 = np.sin(3 * np.pi * y)
    c3 = np.cos(3 * np.pi * y)
    ux, uy = da * s3, a * 3 * np.pi * c3
    uxx, uyy, uxy = dda * s3, -9 * np.pi**2 * a * s3, da * 3 * np.pi * c3
    s = ux**2 + uy**2 + xi**2
    g = s ** ((p - 2) / 2)
    dg_dot = (p - 2) * s ** ((p - 4) / 2) * (ux**2 * uxx + 2 * ux * uy * uxy + uy**2 * uyy)
    return -p * (g * (uxx + uyy) + dg_dot)


@dataclass(frozen=True)
class PLaplacianProblem:
    """``int (|grad u|^2 + xi^2)^(p/2) - f u`` with ``f`` manufactured from the target."""

    p: float
    xi: float = 1e-4
    has_exact_solution: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi}")

    @property
    def is_linear(self) -> bool:
        return False

    def source(self, n: int) -> np.ndarray:
        x, y = grid_coordinates(n)
        return _plap_source(x, y, self.p, self.xi)

    def exact_solution(self, n: int) -> np.ndarray:
        x, y = grid_coordinates(n)
        return _analytic_profile(x, y)

    def with_source(self, n: int, f: np.ndarray) -> ProblemLevel:
        p, xi2 = self.p, self.xi**2
        h = mesh_size(n)

        def cells(u: np.ndarray):
            U = _padded(u)
            base = U[:-1, :-1]
            ux = (U[1:, :-1] - base) / h
            uy = (U[:-1, 1:] - base) / h
            return ux, uy, ux * ux + uy * uy + xi2

        def objective(u: np.ndarray) -> float:
            _, _, s = cells(u)
            return float(h * h * (np.sum(s ** (p / 2)) - np.sum(f * u)))

        def gradient(u: np.ndarray) -> np.ndarray:
            ux, uy, s = cells(u)
            w = h * p * s ** (p / 2 - 1)
            qx, qy = w * ux, w * uy
            G = np.zeros((n + 2, n + 2))
            G[1:, :-1] += qx
            G[:-1, 1:] += qy
            G[:-1, :-1] -= qx + qy
            return G[1:-1, 1:-1] - h * h * f

        return ProblemLevel(
            n=n, objective=objective, gradient=gradient, name=f"plap(p={p:g}, n={n})"
        )

    def level(self, n: int) -> ProblemLevel:
        return self.with_source(n, self.source(n))

    def reference_objective(self, n: int) -> float:
        return self.level(n).objective(self.exact_solution(n))


def plap_objective(prob: PLaplacianProblem, u: GridField) -> float:
    return prob.level(u.n).objective_field(u)


def plap_gradient(prob: PLaplacianProblem, u: GridField) -> GridField:
    return prob.level(u.n).gradient_field(u)


Problem = RotatedAnisotropicProblem | ExpVariationalProblem | PLaplacianProblem


def problem_with(problem: Problem, **changes) -> Problem:
    return replace(problem, **changes)
