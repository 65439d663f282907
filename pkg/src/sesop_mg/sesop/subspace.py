"""Search subspaces and minimization of an objective restricted to them."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import linalg

from ..grid import GridField
from .objective import CorrectedObjective

logger = logging.getLogger(__name__)

EIGEN_CUTOFF = 1e-12
NEWTON_GRADIENT_TOL = 1e-10
NEWTON_MAX_HALVINGS = 20
ARMIJO_C = 1e-4


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Ordered directions: coarse correction, preconditioned gradient, history steps."""

    directions: list[np.ndarray] = field(default_factory=list)
    history: int = 0

    def __post_init__(self) -> None:
        if self.history < 0:
            raise ValueError(f"history count must be nonnegative, got {self.history}")
        dirs = [d.values if isinstance(d, GridField) else np.asarray(d, dtype=float) for d in self.directions]
        object.__setattr__(self, "directions", dirs)

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def pruned(self) -> SubspaceBasis:
        kept = [d for d in self.directions if np.linalg.norm(d) > 0.0 and np.all(np.isfinite(d))]
        return SubspaceBasis(kept, self.history)

    def matrix(self) -> np.ndarray:
        """Directions as the columns of an ``(N, k)`` array."""
        return np.column_stack([d.ravel() for d in self.directions])


def _unwrap(x) -> tuple[np.ndarray, float | None]:
    if isinstance(x, GridField):
        return x.values, x.h
    return np.asarray(x, dtype=float), None


def _wrap(values: np.ndarray, h: float | None):
    return values if h is None else GridField(values, h)


def _as_objective(level) -> CorrectedObjective:
    return level if isinstance(level, CorrectedObjective) else CorrectedObjective(level)


def _truncated_solve(H: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Minimum-norm solution of ``H a = rhs`` dropping tiny eigenvalues."""
    w, V = linalg.eigh(0.5 * (H + H.T))
    top = float(np.max(np.abs(w))) if w.size else 0.0
    if top <= 0.0:
        return np.zeros_like(rhs)
    keep = w > EIGEN_CUTOFF * top
    coeffs = (V[:, keep].T @ rhs) / w[keep]
    return V[:, keep] @ coeffs


def subspace_minimize_quadratic(level, x, basis: SubspaceBasis):
    """Exact minimizer of a quadratic over ``x + span(basis)``."""
    objective = _as_objective(level)
    if not objective.is_linear:
        raise ValueError("quadratic subspace minimization needs a linear level")
    xv, h = _unwrap(x)
    basis = basis.pruned()
    if basis.dimension == 0:
        raise ValueError("subspace basis is empty after pruning")
    P = basis.matrix()
    AP = np.column_stack([objective.hess_apply(d).ravel() for d in basis.directions])
    H = P.T @ AP
    g = P.T @ objective.gradient(xv).ravel()
    alpha = _truncated_solve(H, -g)
    x_next = xv + (P @ alpha).reshape(xv.shape)
    return alpha, _wrap(x_next, h)


def subspace_minimize_newton(level, x, basis: SubspaceBasis, iters: int = 10):
    """Damped Newton on ``a -> F(x + P a)`` with a finite-difference reduced Hessian."""
    objective = _as_objective(level)
    xv, h = _unwrap(x)
    basis = basis.pruned()
    k = basis.dimension
    if k == 0:
        return np.zeros(0), _wrap(xv, h)
    P = basis.matrix()
    norms = np.linalg.norm(P, axis=0)
    Q = P / norms
    shape = xv.shape

    def point(beta: np.ndarray) -> np.ndarray:
        return xv + (Q @ beta).reshape(shape)

    def reduced_gradient(beta: np.ndarray) -> np.ndarray:
        return Q.T @ objective.gradient(point(beta)).ravel()

    eps = 1e-5 * max(1.0, float(np.max(np.abs(xv))))
    f0 = objective.objective(xv)
    beta = np.zeros(k)
    f_cur = f0
    for it in range(iters):
        gr = reduced_gradient(beta)
        if np.linalg.norm(gr) < NEWTON_GRADIENT_TOL:
            break
        H = np.empty((k, k))
        for j in range(k):
            e = np.zeros(k)
            e[j] = eps
            H[:, j] = (reduced_gradient(beta + e) - reduced_gradient(beta - e)) / (2.0 * eps)
        H = 0.5 * (H + H.T)
        w, V = linalg.eigh(H)
        top = float(np.max(np.abs(w)))
        if top > 0.0 and np.any(w > EIGEN_CUTOFF * top):
            w_safe = np.maximum(np.abs(w), EIGEN_CUTOFF * top)
            step = -V @ ((V.T @ gr) / w_safe)
        else:
            step = -gr
        slope = float(gr @ step)
        if slope >= 0.0:
            step, slope = -gr, -float(gr @ gr)
        t = 1.0
        accepted = False
        for _ in range(NEWTON_MAX_HALVINGS):
            candidate = beta + t * step
            fc = objective.objective(point(candidate))
            if np.isfinite(fc) and fc <= f_cur + ARMIJO_C * t * slope:
                beta, f_cur, accepted = candidate, fc, True
                break
            t *= 0.5
        if not accepted:
            logger.debug("subspace Newton stalled at iteration %d", it)
            break
    if not f_cur <= f0:
        return np.zeros(k), _wrap(xv, h)
    return beta / norms, _wrap(point(beta), h)


def history_directions(x: np.ndarray, accepted: Sequence[np.ndarray], count: int) -> list[np.ndarray]:
    """``x - x_{k-1}, x_{k-1} - x_{k-2}, ...`` from the most recent accepted iterates."""
    points = [x, *reversed(list(accepted))]
    return [points[j] - points[j + 1] for j in range(min(count, len(points) - 1))]
