"""Uniform-grid fields and constant-coefficient 3x3 stencils.

Fields hold interior values of a function on the unit square with a zero
(homogeneous Dirichlet) halo. Storage is row-major: ``values[i, j]`` is the
point ``((i + 1) h, (j + 1) h)`` and flattens to index ``i * n + j``.

Stencil weights are indexed ``weights[a, b]`` with ``a`` the x-offset + 1 and
``b`` the y-offset + 1, so ``weights[2, 1]`` couples ``(i, j)`` with
``(i + 1, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import NewType

import numpy as np
from scipy import ndimage, sparse

logger = logging.getLogger(__name__)

ResidualNorm = NewType("ResidualNorm", float)

DENSE_GUARD = 4096


def mesh_size(n: int) -> float:
    """Mesh size of an ``n x n`` interior grid on the unit square."""
    return 1.0 / (n + 1)


@dataclass(frozen=True, eq=False)
class GridField:
    """Immutable interior samples of a grid function."""

    values: np.ndarray
    h: float

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"grid values must be a non-empty square matrix, got {arr.shape}")
        if not self.h > 0:
            raise ValueError(f"mesh size must be positive, got {self.h}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @classmethod
    def zeros(cls, n: int, h: float | None = None) -> GridField:
        return cls(np.zeros((n, n)), mesh_size(n) if h is None else h)

    @classmethod
    def sample(cls, func, n: int) -> GridField:
        """Sample ``func(x, y)`` (vectorized) at the interior points."""
        h = mesh_size(n)
        x, y = grid_coordinates(n)
        return cls(np.asarray(func(x, y), dtype=float), h)

    def flatten(self) -> np.ndarray:
        return self.values.ravel().copy()

    def with_values(self, values: np.ndarray) -> GridField:
        return GridField(np.reshape(values, (self.n, self.n)), self.h)


def grid_coordinates(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Interior node coordinates as ``(x, y)`` arrays indexed ``[i, j]``."""
    h = mesh_size(n)
    pts = h * np.arange(1, n + 1)
    return np.meshgrid(pts, pts, indexing="ij")


@dataclass(frozen=True, eq=False)
class StencilOp:
    """A 3x3 stencil ``scale * weights`` with an explicit ``1/h**2`` scale."""

    weights: np.ndarray
    h: float
    scale: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float, copy=True)
        if w.shape != (3, 3):
            raise ValueError(f"stencil weights must be 3x3, got {w.shape}")
        if not self.h > 0:
            raise ValueError(f"mesh size must be positive, got {self.h}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if np.isnan(self.scale):
            object.__setattr__(self, "scale", 1.0 / self.h**2)

    @property
    def kernel(self) -> np.ndarray:
        """Weights with the scale folded in."""
        return self.scale * self.weights

    @property
    def center(self) -> float:
        return float(self.scale * self.weights[1, 1])

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.weights, self.weights[::-1, ::-1]))

    def rescaled(self, h: float) -> StencilOp:
        """Same weights rediscretized at mesh size ``h``."""
        return StencilOp(self.weights, h)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Apply to a raw ``(n, n)`` array with a zero halo."""
        return ndimage.correlate(values, self.kernel, mode="constant", cval=0.0)

    def sparse_matrix(self, n: int) -> sparse.csr_matrix:
        """The ``n**2 x n**2`` operator under row-major flattening."""
        mat = sparse.csr_matrix((n * n, n * n))
        for a in range(3):
            for b in range(3):
                w = self.kernel[a, b]
                if w == 0.0:
                    continue
                shift_x = sparse.eye(n, k=a - 1, format="csr")
                shift_y = sparse.eye(n, k=b - 1, format="csr")
                mat = mat + w * sparse.kron(shift_x, shift_y, format="csr")
        return mat.tocsr()


def _check_mesh(op: StencilOp, u: GridField) -> None:
    if not np.isclose(op.h, u.h, rtol=1e-12, atol=0.0):
        raise ValueError(f"mesh size mismatch: stencil h={op.h}, field h={u.h}")


def apply_stencil(op: StencilOp, u: GridField) -> GridField:
    _check_mesh(op, u)
    return GridField(op.apply(u.values), u.h)


def residual(op: StencilOp, u: GridField, f: GridField) -> GridField:
    """``f - A u``."""
    if u.n != f.n:
        raise ValueError(f"size mismatch: u has n={u.n}, f has n={f.n}")
    _check_mesh(op, u)
    return GridField(f.values - op.apply(u.values), u.h)


def norm_fro(g: GridField | np.ndarray) -> ResidualNorm:
    values = g.values if isinstance(g, GridField) else g
    return ResidualNorm(float(np.linalg.norm(values)))


def assemble_dense(op: StencilOp, n: int, *, max_unknowns: int = DENSE_GUARD) -> np.ndarray:
    """Dense oracle of ``op`` on an ``n x n`` grid."""
    if n * n > max_unknowns:
        raise ValueError(
            f"dense assembly of {n * n} unknowns exceeds the guard of {max_unknowns}"
        )
    return op.sparse_matrix(n).toarray()
