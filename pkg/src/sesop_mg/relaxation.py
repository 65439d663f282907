"""Smoothers and the preconditioner hook used to build search directions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Protocol

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .exceptions import LineSearchError
from .grid import GridField, StencilOp

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
MAX_HALVINGS = 30


class SmoothedObjective(Protocol):
    """What a smoother needs from a level (or a corrected coarse level)."""

    n: int

    def objective(self, x: np.ndarray) -> float: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


class RelaxationKind(str, Enum):
    DAMPED_JACOBI = "jacobi"
    STEEPEST_DESCENT = "sd"
    NONE = "none"


class PreconditionerKind(str, Enum):
    IDENTITY = "identity"
    JACOBI = "jacobi"
    SYMMETRIC_GAUSS_SEIDEL = "sgs"


class OmegaMode(str, Enum):
    FREQUENCY = "frequency"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class Relaxer:
    kind: RelaxationKind = RelaxationKind.DAMPED_JACOBI
    v1: int = 0
    v2: int = 0
    omega: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RelaxationKind(self.kind))
        if self.v1 < 0 or self.v2 < 0:
            raise ValueError(f"sweep counts must be nonnegative, got v1={self.v1}, v2={self.v2}")
        if not 0.0 < self.omega <= 1.0:
            raise ValueError(f"omega must lie in (0, 1], got {self.omega}")

    def relax(
        self, level: SmoothedObjective, x: np.ndarray, sweeps: int, step: float = 0.5
    ) -> tuple[np.ndarray, float]:
        """Run ``sweeps`` sweeps; returns the iterate and the last accepted SD step."""
        if sweeps == 0 or self.kind is RelaxationKind.NONE:
            return x, step
        for _ in range(sweeps):
            if self.kind is RelaxationKind.DAMPED_JACOBI:
                diag = getattr(level, "diagonal", None)
                if diag is None:
                    raise ValueError("damped Jacobi needs a level with a matrix diagonal")
                x = x - self.omega * level.gradient(x) / diag
            else:
                x, step = sd_sweep(level, x, step)
        return x, step


@dataclass(frozen=True)
class Preconditioner:
    kind: PreconditionerKind = PreconditionerKind.JACOBI

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PreconditionerKind(self.kind))


def jacobi_step(op: StencilOp, u: np.ndarray, f: np.ndarray, omega: float) -> np.ndarray:
    if op.center == 0.0:
        raise ValueError("damped Jacobi needs a nonzero stencil center")
    return u + omega * (f - op.apply(u)) / op.center


def jacobi_sweep(op: StencilOp, u: GridField, f: GridField, omega: float) -> GridField:
    if not 0.0 < omega <= 1.0:
        raise ValueError(f"omega must lie in (0, 1], got {omega}")
    return GridField(jacobi_step(op, u.values, f.values, omega), u.h)


def _jacobi_scaled_symbols(op: StencilOp, mode: OmegaMode, m: int, n: int | None) -> np.ndarray:
    from .analysis.lfa import FrequencyPartition, symbol

    if mode is OmegaMode.FREQUENCY:
        part = FrequencyPartition(m)
        t1, t2 = part.high_thetas()
    else:
        if n is None:
            raise ValueError("the dirichlet omega mode needs the grid size n")
        modes = np.pi * np.arange(1, n + 1) / (n + 1)
        t1, t2 = np.meshgrid(modes, modes, indexing="ij")
        high = np.maximum(t1, t2) >= np.pi / 2
        t1, t2 = t1[high], t2[high]
    s = symbol(op, (t1, t2)).real / op.center
    return s


def optimal_jacobi_omega(
    op: StencilOp, *, mode: OmegaMode | str = OmegaMode.FREQUENCY, m: int = 64, n: int | None = None
) -> float:
    """Damping minimizing the Jacobi smoothing factor over high frequencies."""
    s = _jacobi_scaled_symbols(op, OmegaMode(mode), m, n)
    s_min, s_max = float(s.min()), float(s.max())
    if s_min <= 0.0:
        raise ValueError(
            f"symbol/center is not of one sign on high frequencies (min {s_min:.3e})"
        )
    omega = 2.0 / (s_min + s_max)
    logger.debug("optimal Jacobi omega %.4f from s in [%.4f, %.4f]", omega, s_min, s_max)
    return min(omega, 1.0)


def smoothing_factor(op: StencilOp, omega: float, *, m: int = 64) -> float:
    s = _jacobi_scaled_symbols(op, OmegaMode.FREQUENCY, m, None)
    return float(np.max(np.abs(1.0 - omega * s)))


def sd_sweep(level: SmoothedObjective, u: np.ndarray, step: float = 0.5) -> tuple[np.ndarray, float]:
    """One steepest-descent step.

    Quadratic levels take the exact step ``g.g / g.Ag``; others backtrack
    (Armijo, halving) from twice the previously accepted ``step``.
    """
    g = level.gradient(u)
    gg = float(np.vdot(g, g))
    if gg == 0.0:
        return u, step
    if getattr(level, "is_linear", False):
        curvature = float(np.vdot(g, level.hess_apply(g)))
        if curvature <= 0.0:
            raise LineSearchError("non-positive curvature along the gradient")
        t = gg / curvature
        return u - t * g, t

    f0 = level.objective(u)
    t = 2.0 * step
    for _ in range(MAX_HALVINGS + 1):
        trial = u - t * g
        ft = level.objective(trial)
        if np.isfinite(ft) and ft <= f0 - ARMIJO_C * t * gg:
            return trial, t
        t *= 0.5
    raise LineSearchError(
        f"no sufficient decrease after {MAX_HALVINGS} halvings (|g|^2={gg:.3e})"
    )


@dataclass(frozen=True, eq=False)
class TriangularSplit:
    """Lower and upper triangles (diagonal included) of a level matrix."""

    lower: sparse.csr_matrix
    upper: sparse.csr_matrix
    diagonal: np.ndarray

    @classmethod
    def of(cls, matrix: sparse.spmatrix) -> TriangularSplit:
        A = sparse.csr_matrix(matrix)
        return cls(sparse.tril(A, format="csr"), sparse.triu(A, format="csr"), A.diagonal())

    def apply_sgs(self, g: np.ndarray) -> np.ndarray:
        y = splinalg.spsolve_triangular(self.lower, g.ravel(), lower=True)
        z = splinalg.spsolve_triangular(self.upper, self.diagonal * y, lower=False)
        return z.reshape(g.shape)


def precondition(
    kind: PreconditionerKind,
    g: np.ndarray,
    *,
    matrix: sparse.spmatrix | None = None,
    diagonal: np.ndarray | None = None,
    split: TriangularSplit | None = None,
) -> np.ndarray:
    """Apply ``Phi`` to a raw gradient array.

    Levels without a matrix (the variational problems) fall back to the
    identity. Symmetric Gauss-Seidel reuses ``split`` when the caller holds
    one, otherwise it splits ``matrix`` on the spot.
    """
    kind = PreconditionerKind(kind)
    if kind is PreconditionerKind.IDENTITY:
        return g
    if kind is PreconditionerKind.JACOBI:
        if diagonal is None:
            return g
        return g / diagonal
    if split is None:
        if matrix is None:
            return g
        split = TriangularSplit.of(matrix)
    return split.apply_sgs(g)


def apply_preconditioner(P: Preconditioner, op: StencilOp, g: GridField) -> GridField:
    matrix = op.sparse_matrix(g.n)
    diagonal = np.full((g.n, g.n), op.center)
    return GridField(precondition(P.kind, g.values, matrix=matrix, diagonal=diagonal), g.h)
