"""Local Fourier analysis of stencils and of the two-grid blended operator.

Frequencies are sampled on ``theta_k = -pi + 2 pi k / m`` per axis. A low
frequency ``theta`` couples with its three harmonics in the fixed order
``(t1, t2), (t1b, t2), (t1, t2b), (t1b, t2b)`` where ``tb = t + pi`` for
``t < 0`` and ``t - pi`` otherwise.

Unless stated otherwise the smoother part uses ``Phi = D^{-1}`` (Jacobi
scaling), which makes every quantity here independent of ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np
from scipy import optimize

from ..grid import StencilOp
from ..transfer import ProlongationKind
from .tg import FixedCoefficients, SpectrumSummary, optimal_coefficients, upsilon_spectral_radius

logger = logging.getLogger(__name__)

TRIVIAL_TOL = 1e-12
IMAG_TOL = 1e-8


class CoarseMode(str, Enum):
    REDISCRETIZE = "rediscretize"
    GALERKIN = "galerkin"


@dataclass(frozen=True)
class FrequencyPartition:
    m: int = 64

    def __post_init__(self) -> None:
        if self.m < 4 or self.m % 4:
            raise ValueError(f"sampling resolution must be a positive multiple of 4, got {self.m}")

    @property
    def axis(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.m) / self.m

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    @property
    def low_mask(self) -> np.ndarray:
        t1, t2 = self.grid()
        half = np.pi / 2
        return (t1 >= -half) & (t1 < half) & (t2 >= -half) & (t2 < half)

    @property
    def high_mask(self) -> np.ndarray:
        return ~self.low_mask

    def low_thetas(self) -> tuple[np.ndarray, np.ndarray]:
        t1, t2 = self.grid()
        mask = self.low_mask
        return t1[mask], t2[mask]

    def high_thetas(self) -> tuple[np.ndarray, np.ndarray]:
        t1, t2 = self.grid()
        mask = self.high_mask
        return t1[mask], t2[mask]


def symbol(op: StencilOp, theta):
    """``sum_k a_k exp(i theta.k)`` over the 9 stencil offsets."""
    t1 = np.asarray(theta[0], dtype=float)
    t2 = np.asarray(theta[1], dtype=float)
    total = np.zeros(np.broadcast(t1, t2).shape, dtype=complex)
    kernel = op.kernel
    for a in range(3):
        for b in range(3):
            w = kernel[a, b]
            if w != 0.0:
                total = total + w * np.exp(1j * (t1 * (a - 1) + t2 * (b - 1)))
    if total.ndim == 0:
        return complex(total)
    return total


def shifted(t: np.ndarray) -> np.ndarray:
    return np.where(t < 0, t + np.pi, t - np.pi)


def harmonics(t1: np.ndarray, t2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stacked harmonics, shape ``(K, 4)`` per coordinate."""
    b1, b2 = shifted(t1), shifted(t2)
    return np.stack([t1, b1, t1, b1], axis=-1), np.stack([t2, t2, b2, b2], axis=-1)


def _full_weighting_symbol(h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    return 0.25 * (1.0 + np.cos(h1)) * (1.0 + np.cos(h2))


def _prolongation_symbol(kind: ProlongationKind, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    if kind is ProlongationKind.BICUBIC:

        def one_d(t):
            return 1.0 + 9.0 / 8.0 * np.cos(t) - 1.0 / 8.0 * np.cos(3.0 * t)

        return 0.25 * one_d(h1) * one_d(h2)
    return _full_weighting_symbol(h1, h2)


def h_ellipticity(op: StencilOp, m: int = 64) -> float:
    mags = np.abs(symbol(op, FrequencyPartition(m).high_thetas()))
    return float(mags.min() / mags.max())


def ideal_factors(op: StencilOp, m: int = 64) -> tuple[float, float]:
    """``((1 - E)/(1 + E), (1 - sqrt E)/(1 + sqrt E))`` from the h-ellipticity ``E``."""
    e = h_ellipticity(op, m)
    root = math.sqrt(e)
    return (1.0 - e) / (1.0 + e), (1.0 - root) / (1.0 + root)


@dataclass(frozen=True)
class TwoGridSymbols:
    """Vectorized two-grid symbols over a set of low frequencies (trivial ones removed)."""

    theta: tuple[np.ndarray, np.ndarray]
    a_diag: np.ndarray
    restriction: np.ndarray
    prolongation: np.ndarray
    coarse: np.ndarray
    phi: np.ndarray

    @property
    def size(self) -> int:
        return int(self.coarse.shape[0])

    def smoother_part(self) -> np.ndarray:
        """``Phi~ A~`` as a batch of 4x4 matrices."""
        eye = np.eye(4)
        return eye[None, :, :] * (self.phi * self.a_diag)[:, None, :]

    def coarse_part(self) -> np.ndarray:
        """``P~ A_H~^{-1} R~ A~`` as a batch of 4x4 matrices."""
        outer = self.prolongation[:, :, None] * self.restriction[:, None, :]
        return outer * self.a_diag[:, None, :] / self.coarse[:, None, None]

    def w_alpha(self, alpha: float) -> np.ndarray:
        return alpha * self.smoother_part() + (1.0 - alpha) * self.coarse_part()

    def w_alpha_eigenvalues(self, alpha: float) -> np.ndarray:
        eig = np.linalg.eigvals(self.w_alpha(alpha))
        imag = float(np.max(np.abs(eig.imag))) if eig.size else 0.0
        if imag > IMAG_TOL * max(1.0, float(np.max(np.abs(eig.real)))):
            logger.warning("W_alpha symbol has complex eigenvalues (max imag %.2e)", imag)
        return eig.real


def two_grid_symbols(
    op: StencilOp,
    prolongation: ProlongationKind | str,
    coarse_mode: CoarseMode | str,
    thetas: tuple[np.ndarray, np.ndarray],
    *,
    preconditioner: str = "jacobi",
) -> TwoGridSymbols:
    prolongation = ProlongationKind(prolongation)
    coarse_mode = CoarseMode(coarse_mode)
    t1 = np.atleast_1d(np.asarray(thetas[0], dtype=float))
    t2 = np.atleast_1d(np.asarray(thetas[1], dtype=float))
    h1, h2 = harmonics(t1, t2)
    a_diag = symbol(op, (h1, h2)).real
    restriction = _full_weighting_symbol(h1, h2)
    prolong = _prolongation_symbol(prolongation, h1, h2)
    if coarse_mode is CoarseMode.REDISCRETIZE:
        coarse = 0.25 * symbol(op, (2.0 * t1, 2.0 * t2)).real
    else:
        coarse = np.sum(restriction * a_diag * prolong, axis=-1)
    tiny = TRIVIAL_TOL * op.scale
    keep = (np.abs(coarse) >= tiny) & np.all(np.abs(a_diag) >= tiny, axis=-1)
    if preconditioner == "jacobi":
        phi_value = 1.0 / op.center
    elif preconditioner == "identity":
        phi_value = 1.0
    else:
        raise ValueError(f"unsupported preconditioner for Fourier analysis: {preconditioner}")
    phi = np.full(a_diag[keep].shape, phi_value)
    return TwoGridSymbols(
        theta=(t1[keep], t2[keep]),
        a_diag=a_diag[keep],
        restriction=restriction[keep],
        prolongation=prolong[keep],
        coarse=coarse[keep],
        phi=phi,
    )


@dataclass(frozen=True)
class TwoGridSymbolSample:
    theta: tuple[float, float]
    a_diag: np.ndarray
    restriction: np.ndarray
    prolongation: np.ndarray
    coarse: float
    w_alpha: np.ndarray
    eigenvalues: np.ndarray


def two_grid_symbol(
    op: StencilOp,
    prolongation: ProlongationKind | str,
    coarse_mode: CoarseMode | str,
    alpha: float,
    theta: tuple[float, float],
    *,
    preconditioner: str = "jacobi",
) -> TwoGridSymbolSample:
    t1, t2 = float(theta[0]), float(theta[1])
    half = np.pi / 2
    if not (-half <= t1 < half and -half <= t2 < half):
        raise ValueError(f"theta {theta} is not a low frequency")
    batch = two_grid_symbols(
        op, prolongation, coarse_mode, (np.array([t1]), np.array([t2])), preconditioner=preconditioner
    )
    if batch.size == 0:
        raise ValueError(f"theta {theta} is a trivial angle")
    w = batch.w_alpha(alpha)[0]
    return TwoGridSymbolSample(
        theta=(t1, t2),
        a_diag=batch.a_diag[0],
        restriction=batch.restriction[0],
        prolongation=batch.prolongation[0],
        coarse=float(batch.coarse[0]),
        w_alpha=w,
        eigenvalues=np.linalg.eigvals(w).real,
    )


def _low_batch(op, prolongation, coarse_mode, m, preconditioner="jacobi") -> TwoGridSymbols:
    return two_grid_symbols(
        op, prolongation, coarse_mode, FrequencyPartition(m).low_thetas(), preconditioner=preconditioner
    )


def _kappa(batch: TwoGridSymbols, alpha: float) -> float:
    eig = batch.w_alpha_eigenvalues(alpha)
    lo = float(eig.min())
    if lo <= 0.0:
        return math.inf
    return float(eig.max()) / lo


def kappa_of_alpha(
    op: StencilOp,
    prolongation: ProlongationKind | str,
    coarse_mode: CoarseMode | str,
    alpha: float,
    m: int = 64,
) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return _kappa(_low_batch(op, prolongation, coarse_mode, m), alpha)


@dataclass(frozen=True)
class KappaOptimum:
    alpha: float
    kappa: float
    coefficients: FixedCoefficients
    spectrum: SpectrumSummary

    @property
    def predicted_factor(self) -> float:
        return float(self.coefficients.predicted_factor)


def minimize_kappa(
    op: StencilOp,
    prolongation: ProlongationKind | str = ProlongationKind.BILINEAR,
    coarse_mode: CoarseMode | str = CoarseMode.REDISCRETIZE,
    m: int = 64,
    tol: float = 1e-6,
    *,
    with_history: bool = True,
    sweep_points: int = 41,
) -> KappaOptimum:
    """Golden-section search for the ``alpha`` minimizing ``kappa(W_alpha)``.

    A coarse sweep over ``alpha`` brackets the minimum first; a sweep that is
    not unimodal is reported and the search proceeds in the best bracket.
    """
    batch = _low_batch(op, prolongation, coarse_mode, m)
    alphas = np.geomspace(1e-3, 1.0, sweep_points)
    kappas = np.array([_kappa(batch, a) for a in alphas])
    finite = np.isfinite(kappas)
    diffs = np.sign(np.diff(kappas[finite]))
    turns = int(np.count_nonzero(np.diff(diffs[diffs != 0]) != 0))
    if turns > 1:
        logger.warning("kappa(alpha) is not unimodal on the sweep grid (%d turns)", turns)
    best = int(np.argmin(kappas))
    if best == len(alphas) - 1:
        alpha = 1.0
    elif best == 0:
        alpha = float(alphas[0])
    else:
        lo, mid, hi = alphas[best - 1], alphas[best], alphas[best + 1]
        try:
            result = optimize.minimize_scalar(
                lambda a: _kappa(batch, float(a)), bracket=(lo, mid, hi), method="golden", tol=tol
            )
            alpha = float(np.clip(result.x, lo, hi))
        except ValueError:
            # flat sweep around the minimum; no strict bracket
            alpha = float(mid)
        if _kappa(batch, alpha) > kappas[best]:
            alpha = float(mid)
    eig = batch.w_alpha_eigenvalues(alpha)
    spectrum = SpectrumSummary(float(eig.min()), float(eig.max()))
    coefficients = optimal_coefficients(spectrum, with_history, alpha=alpha)
    logger.debug("alpha*=%.6f kappa*=%.4f factor=%.4f", alpha, spectrum.kappa, coefficients.predicted_factor)
    return KappaOptimum(alpha=alpha, kappa=spectrum.kappa, coefficients=coefficients, spectrum=spectrum)


def fixed_step_factor(
    op: StencilOp,
    prolongation: ProlongationKind | str,
    coarse_mode: CoarseMode | str,
    coefficients: FixedCoefficients,
    m: int = 64,
) -> float:
    """Predicted asymptotic factor of the fixed-step iteration (Jacobi ``Phi``)."""
    batch = _low_batch(op, prolongation, coarse_mode, m)
    gamma = (1.0 + coefficients.c1) * np.eye(4)[None, :, :] - (
        coefficients.c2 * batch.smoother_part() + coefficients.c3 * batch.coarse_part()
    )
    b = np.linalg.eigvals(gamma)
    return upsilon_spectral_radius(b.ravel(), coefficients.c1)


def ordinary_coefficients(
    op: StencilOp,
    prolongation: ProlongationKind | str = ProlongationKind.BILINEAR,
    coarse_mode: CoarseMode | str = CoarseMode.REDISCRETIZE,
    m: int = 64,
    *,
    with_history: bool = True,
) -> FixedCoefficients:
    """Stepsizes with a unit coarse-correction weight and ``kappa = 1/E_h``.

    ``c1`` and ``c2`` come from the optimal formulas with ``lambda_min`` the
    smallest Jacobi-scaled high-frequency symbol.
    """
    mags = np.abs(symbol(op, FrequencyPartition(m).high_thetas())) / op.center
    spectrum = SpectrumSummary(float(mags.min()), float(mags.max()))
    base = optimal_coefficients(spectrum, with_history)
    draft = FixedCoefficients.from_weights(base.c1, base.c23, 1.0)
    predicted = fixed_step_factor(op, prolongation, coarse_mode, draft, m)
    return FixedCoefficients.from_weights(base.c1, base.c23, 1.0, predicted_factor=predicted)
