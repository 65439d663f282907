"""Multilevel ladders of problem levels and transfers.

Level 0 is the finest grid; level ``L - 1`` the coarsest. Linear ladders
rediscretize the stencil at ``2h`` (or form ``R A P``); variational ladders
rediscretize the continuous functional.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.sparse import linalg as splinalg

from .analysis.lfa import CoarseMode
from .problems import ExpVariationalProblem, PLaplacianProblem, ProblemLevel, RotatedAnisotropicProblem
from .relaxation import OmegaMode, optimal_jacobi_omega
from .transfer import ProlongationKind, TransferPair, galerkin_coarse_sparse

logger = logging.getLogger(__name__)

# (H/h)^2: restricts the h^2-weighted gradients of variational levels with the canonical scaling
VARIATIONAL_GRADIENT_SCALE = 4.0


def level_sizes(fine_n: int, coarsest_n: int) -> list[int]:
    if coarsest_n < 1 or fine_n < coarsest_n:
        raise ValueError(f"incompatible sizes: fine_n={fine_n}, coarsest_n={coarsest_n}")
    sizes = [fine_n]
    while sizes[-1] > coarsest_n:
        n = sizes[-1]
        if n % 2 == 0:
            break
        sizes.append((n - 1) // 2)
    if sizes[-1] != coarsest_n:
        raise ValueError(
            f"incompatible sizes: coarsening {fine_n} by factor 2 never reaches {coarsest_n}"
        )
    return sizes


@dataclass(eq=False)
class Hierarchy:
    """Levels and transfers, fixed once built.

    ``_factors`` is an internal memo of sparse LU factors filled by
    :meth:`solve_linear`; it never changes what the hierarchy describes.
    """

    levels: list[ProblemLevel]
    transfers: list[TransferPair]
    coarse_mode: CoarseMode = CoarseMode.REDISCRETIZE
    omegas: list[float] = field(default_factory=list)
    gradient_scale: float = 1.0
    _factors: dict[int, splinalg.SuperLU] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.levels) < 1:
            raise ValueError("a hierarchy needs at least one level")
        if len(self.transfers) != len(self.levels) - 1:
            raise ValueError("need exactly one transfer pair between adjacent levels")
        for t, fine, coarse in zip(self.transfers, self.levels[:-1], self.levels[1:], strict=True):
            if t.fine_n != fine.n or t.coarse_n != coarse.n:
                raise ValueError(
                    f"transfer {t.fine_n}->{t.coarse_n} does not match levels {fine.n}->{coarse.n}"
                )
        if not self.omegas:
            self.omegas = [1.0] * len(self.levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def is_linear(self) -> bool:
        return self.levels[0].is_linear

    @property
    def finest(self) -> ProblemLevel:
        return self.levels[0]

    def is_coarsest(self, level: int) -> bool:
        return level == self.depth - 1

    def restrict(self, level: int, x: np.ndarray) -> np.ndarray:
        """Level ``level`` to ``level + 1``."""
        return self.transfers[level].restrict_values(x)

    def restrict_gradient(self, level: int, g: np.ndarray) -> np.ndarray:
        return self.gradient_scale * self.transfers[level].restrict_values(g)

    def prolong(self, level: int, xc: np.ndarray) -> np.ndarray:
        """Level ``level + 1`` to ``level``."""
        return self.transfers[level].prolong_values(xc)

    def solve_linear(self, level: int, rhs: np.ndarray) -> np.ndarray:
        """Exact solve with the level matrix (LU factorization cached per level)."""
        lvl = self.levels[level]
        if lvl.matrix is None:
            raise ValueError(f"level {level} is not linear")
        lu = self._factors.get(level)
        if lu is None:
            logger.debug("factorizing level %d (%d unknowns)", level, lvl.n * lvl.n)
            lu = splinalg.splu(lvl.matrix.tocsc())
            self._factors[level] = lu
        return lu.solve(rhs.ravel()).reshape(rhs.shape)


def build_linear_hierarchy(
    problem: RotatedAnisotropicProblem,
    fine_n: int,
    coarsest_n: int,
    *,
    prolongation: ProlongationKind | str = ProlongationKind.BILINEAR,
    coarse_mode: CoarseMode | str = CoarseMode.REDISCRETIZE,
    omega_mode: OmegaMode | str = OmegaMode.FREQUENCY,
) -> Hierarchy:
    coarse_mode = CoarseMode(coarse_mode)
    sizes = level_sizes(fine_n, coarsest_n)
    transfers = [TransferPair.for_fine(n, prolongation) for n in sizes[:-1]]
    levels = [problem.level(fine_n)]
    for t, n in zip(transfers, sizes[1:], strict=True):
        if coarse_mode is CoarseMode.GALERKIN:
            matrix = galerkin_coarse_sparse(levels[-1].matrix, t)
            levels.append(ProblemLevel.quadratic(matrix, None, n, name=f"galerkin(n={n})"))
        else:
            op = problem.stencil(n)
            levels.append(
                ProblemLevel.quadratic(op.sparse_matrix(n), None, n, name=f"rediscretized(n={n})", stencil=op)
            )
    omegas: list[float] = []
    for lvl in levels:
        if lvl.linear_stencil is not None:
            omegas.append(optimal_jacobi_omega(lvl.linear_stencil, mode=omega_mode, n=lvl.n))
        else:
            omegas.append(omegas[0])
    logger.info("linear hierarchy %s (%s coarse levels)", sizes, coarse_mode.value)
    return Hierarchy(levels=levels, transfers=transfers, coarse_mode=coarse_mode, omegas=omegas)


def build_nonlinear_hierarchy(
    problem: ExpVariationalProblem | PLaplacianProblem,
    fine_n: int,
    coarsest_n: int,
    *,
    prolongation: ProlongationKind | str = ProlongationKind.BILINEAR,
) -> Hierarchy:
    sizes = level_sizes(fine_n, coarsest_n)
    transfers = [TransferPair.for_fine(n, prolongation) for n in sizes[:-1]]
    levels = [problem.level(n) for n in sizes]
    logger.info("variational hierarchy %s", sizes)
    return Hierarchy(
        levels=levels,
        transfers=transfers,
        coarse_mode=CoarseMode.REDISCRETIZE,
        gradient_scale=VARIATIONAL_GRADIENT_SCALE,
    )


def build_hierarchy(problem, fine_n: int, coarsest_n: int, **kwargs) -> Hierarchy:
    if problem.is_linear:
        return build_linear_hierarchy(problem, fine_n, coarsest_n, **kwargs)
    kwargs.pop("coarse_mode", None)
    kwargs.pop("omega_mode", None)
    return build_nonlinear_hierarchy(problem, fine_n, coarsest_n, **kwargs)
