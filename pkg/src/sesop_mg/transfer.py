"""Grid transfers between a fine grid and its factor-two coarsening.

Coarse point ``I`` coincides with fine point ``2I + 1``; both grids carry a
zero halo. Every transfer is a tensor product of a 1D operator, so the 2D
operators are applied as ``T1 @ X @ T1.T`` on the ``(n, n)`` value arrays
and assembled as ``kron(T1, T1)`` when a matrix is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
import logging

import numpy as np
from scipy import sparse

from .grid import GridField

logger = logging.getLogger(__name__)


class RestrictionKind(str, Enum):
    FULL_WEIGHTING = "full_weighting"


class ProlongationKind(str, Enum):
    BILINEAR = "bilinear"
    BICUBIC = "bicubic"


def coarse_size(fine_n: int) -> int:
    if fine_n < 3 or fine_n % 2 == 0:
        raise ValueError(f"fine grid size must be odd and >= 3, got {fine_n}")
    return (fine_n - 1) // 2


def _bilinear_1d(coarse_n: int) -> sparse.csr_matrix:
    fine_n = 2 * coarse_n + 1
    rows, cols, vals = [], [], []
    for c in range(coarse_n):
        for offset, w in ((-1, 0.5), (0, 1.0), (1, 0.5)):
            rows.append(2 * c + 1 + offset)
            cols.append(c)
            vals.append(w)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(fine_n, coarse_n))


def _bicubic_1d(coarse_n: int) -> sparse.csr_matrix:
    """Cubic midpoint rule (-1, 9, 9, -1)/16, bilinear in the boundary cells."""
    fine_n = 2 * coarse_n + 1
    mat = sparse.lil_matrix((fine_n, coarse_n))
    for c in range(coarse_n):
        mat[2 * c + 1, c] = 1.0
    # fine point 2k sits between coarse k-1 and k; coarse -1 and coarse_n are boundary
    for k in range(coarse_n + 1):
        row = 2 * k
        if k - 2 < -1 or k + 1 > coarse_n:
            for c in (k - 1, k):
                if 0 <= c < coarse_n:
                    mat[row, c] = 0.5
            continue
        for c, w in ((k - 2, -1 / 16), (k - 1, 9 / 16), (k, 9 / 16), (k + 1, -1 / 16)):
            if 0 <= c < coarse_n:
                mat[row, c] = w
    return mat.tocsr()


@dataclass(frozen=True)
class TransferPair:
    """Full-weighting restriction paired with bilinear or bicubic prolongation."""

    fine_n: int
    coarse_n: int
    prolong_kind: ProlongationKind = ProlongationKind.BILINEAR
    restrict_kind: RestrictionKind = RestrictionKind.FULL_WEIGHTING

    def __post_init__(self) -> None:
        if self.fine_n != 2 * self.coarse_n + 1:
            raise ValueError(
                f"incompatible sizes: fine_n={self.fine_n} must equal 2*coarse_n+1 "
                f"with coarse_n={self.coarse_n}"
            )
        object.__setattr__(self, "prolong_kind", ProlongationKind(self.prolong_kind))

    @classmethod
    def for_fine(cls, fine_n: int, prolong_kind: ProlongationKind | str = "bilinear") -> TransferPair:
        return cls(fine_n, coarse_size(fine_n), ProlongationKind(prolong_kind))

    @cached_property
    def restriction_1d(self) -> sparse.csr_matrix:
        return (0.5 * _bilinear_1d(self.coarse_n).T).tocsr()

    @cached_property
    def prolongation_1d(self) -> sparse.csr_matrix:
        if self.prolong_kind is ProlongationKind.BICUBIC:
            return _bicubic_1d(self.coarse_n)
        return _bilinear_1d(self.coarse_n)

    @cached_property
    def restriction_matrix(self) -> sparse.csr_matrix:
        r1 = self.restriction_1d
        return sparse.kron(r1, r1, format="csr")

    @cached_property
    def prolongation_matrix(self) -> sparse.csr_matrix:
        p1 = self.prolongation_1d
        return sparse.kron(p1, p1, format="csr")

    def restrict_values(self, fine: np.ndarray) -> np.ndarray:
        if fine.shape != (self.fine_n, self.fine_n):
            raise ValueError(f"expected a {self.fine_n}x{self.fine_n} fine array, got {fine.shape}")
        r1 = self.restriction_1d
        return np.asarray(r1 @ (r1 @ fine).T).T

    def prolong_values(self, coarse: np.ndarray) -> np.ndarray:
        if coarse.shape != (self.coarse_n, self.coarse_n):
            raise ValueError(
                f"expected a {self.coarse_n}x{self.coarse_n} coarse array, got {coarse.shape}"
            )
        p1 = self.prolongation_1d
        return np.asarray(p1 @ (p1 @ coarse).T).T


def restrict(t: TransferPair, fine: GridField) -> GridField:
    return GridField(t.restrict_values(fine.values), 2.0 * fine.h)


def prolong(t: TransferPair, coarse: GridField) -> GridField:
    return GridField(t.prolong_values(coarse.values), 0.5 * coarse.h)


def galerkin_coarse_dense(A: np.ndarray, t: TransferPair) -> np.ndarray:
    """Dense ``R A P``."""
    size = t.fine_n * t.fine_n
    if A.shape != (size, size):
        raise ValueError(f"size mismatch: A is {A.shape}, transfers expect {size}x{size}")
    R = t.restriction_matrix.toarray()
    P = t.prolongation_matrix.toarray()
    return R @ A @ P


def galerkin_coarse_sparse(A: sparse.spmatrix, t: TransferPair) -> sparse.csr_matrix:
    return (t.restriction_matrix @ A @ t.prolongation_matrix).tocsr()
