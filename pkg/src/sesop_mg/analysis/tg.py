"""Fixed-stepsize two-grid theory.

The fixed-step iteration ``x_k = x_{k-1} + c1 (x_{k-1} - x_{k-2}) + c2 Phi r +
c3 P A_H^{-1} R r`` has error recurrence ``e_k = Gamma e_{k-1} - c1 e_{k-2}``
with ``Gamma = (1 + c1) I - c23 W_alpha``. Each eigenvalue ``b`` of Gamma
yields the two roots of ``r^2 - b r + c1 = 0``; the iteration converges at
the largest root modulus. Everything here is dense and meant for small
systems or for scalar spectra coming from the Fourier analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumSummary:
    lambda_min: float
    lambda_max: float

    def __post_init__(self) -> None:
        if not self.lambda_min > 0:
            raise ValueError(f"lambda_min must be positive, got {self.lambda_min}")
        if self.lambda_max < self.lambda_min:
            raise ValueError(
                f"kappa < 1: lambda_max={self.lambda_max} < lambda_min={self.lambda_min}"
            )

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min

    @property
    def mu(self) -> float:
        k = self.kappa
        return (k - 1.0) / (k + 1.0)


@dataclass(frozen=True)
class FixedCoefficients:
    """Stepsizes ``(c1, c23, alpha)``; ``c2 = alpha c23`` and ``c3 = (1 - alpha) c23``."""

    c1: float
    c23: float
    alpha: float = 1.0
    predicted_factor: float | None = None

    def __post_init__(self) -> None:
        if self.c1 < 0:
            raise ValueError(f"c1 must be nonnegative, got {self.c1}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def c2(self) -> float:
        return self.alpha * self.c23

    @property
    def c3(self) -> float:
        return (1.0 - self.alpha) * self.c23

    @classmethod
    def from_weights(
        cls, c1: float, c2: float, c3: float, predicted_factor: float | None = None
    ) -> FixedCoefficients:
        c23 = c2 + c3
        alpha = c2 / c23 if c23 != 0 else 1.0
        return cls(c1=c1, c23=c23, alpha=alpha, predicted_factor=predicted_factor)

    def as_dict(self) -> dict[str, float | None]:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "c23": self.c23,
            "alpha": self.alpha,
            "predicted_factor": self.predicted_factor,
        }


@dataclass(frozen=True)
class EigSplit:
    """Eigenvalue extremes of ``A`` split into prolongation-range ("coarse") and the rest ("fine")."""

    eta_fmax: float
    eta_fmin: float
    eta_cmax: float
    eta_cmin: float

    def __post_init__(self) -> None:
        if not (self.eta_fmax >= self.eta_fmin > 0):
            raise ValueError("need eta_fmax >= eta_fmin > 0")
        if not (self.eta_cmax >= self.eta_cmin > 0):
            raise ValueError("need eta_cmax >= eta_cmin > 0")


def _cgc_operator(P: np.ndarray, A_H: np.ndarray, R: np.ndarray | None) -> np.ndarray:
    R = P.T if R is None else R
    return P @ linalg.solve(A_H, R)


def w_alpha_dense(
    A: np.ndarray,
    Phi: np.ndarray,
    P: np.ndarray,
    A_H: np.ndarray,
    alpha: float,
    *,
    R: np.ndarray | None = None,
) -> np.ndarray:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return (alpha * Phi + (1.0 - alpha) * _cgc_operator(P, A_H, R)) @ A


def gamma_dense(
    A: np.ndarray,
    Phi: np.ndarray,
    P: np.ndarray,
    A_H: np.ndarray,
    c: FixedCoefficients,
    *,
    R: np.ndarray | None = None,
) -> np.ndarray:
    identity = np.eye(A.shape[0])
    return (1.0 + c.c1) * identity - (c.c2 * Phi + c.c3 * _cgc_operator(P, A_H, R)) @ A


def upsilon_dense(gamma: np.ndarray, c1: float) -> np.ndarray:
    """Block companion matrix propagating ``(e_k, e_{k-1})``."""
    n = gamma.shape[0]
    top = np.hstack([gamma, -c1 * np.eye(n)])
    bottom = np.hstack([np.eye(n), np.zeros((n, n))])
    return np.vstack([top, bottom])


def quadratic_roots(b, c1: float) -> tuple[np.ndarray, np.ndarray]:
    """Both roots of ``r^2 - b r + c1 = 0``; complex where ``b^2 < 4 c1``."""
    b = np.asarray(b, dtype=complex)
    disc = np.sqrt(b * b - 4.0 * c1)
    return 0.5 * (b + disc), 0.5 * (b - disc)


def upsilon_spectral_radius(b_values, c1: float) -> float:
    b = np.atleast_1d(np.asarray(b_values))
    if b.size == 0:
        return 0.0
    r1, r2 = quadratic_roots(b, c1)
    return float(np.max(np.maximum(np.abs(r1), np.abs(r2))))


def r_hat(c1: float, c23: float, lam) -> np.ndarray:
    """Root modulus as a function of the ``W_alpha`` eigenvalue ``lam``."""
    b = 1.0 + c1 - c23 * np.asarray(lam, dtype=float)
    r1, r2 = quadratic_roots(b, c1)
    return np.maximum(np.abs(r1), np.abs(r2))


def meeting_point_c23(c1: float, spectrum: SpectrumSummary) -> float:
    """``c23`` balancing the two spectrum ends: ``b(lambda_min) = -b(lambda_max)``."""
    return 2.0 * (1.0 + c1) / (spectrum.lambda_max + spectrum.lambda_min)


def c1_minimizer(mu: float) -> tuple[float, float]:
    """The roots ``(c1_minus, c1_plus)`` where the discriminant vanishes; ``c1_minus`` is optimal."""
    if not 0.0 <= mu < 1.0:
        raise ValueError(f"mu must lie in [0, 1), got {mu}")
    if mu == 0.0:
        return 0.0, math.inf
    base = 2.0 / mu**2 - 1.0
    spread = (2.0 / mu**2) * math.sqrt(1.0 - mu**2)
    return base - spread, base + spread


def optimal_coefficients(
    spec: SpectrumSummary, with_history: bool, *, alpha: float = 1.0
) -> FixedCoefficients:
    kappa = spec.kappa
    if kappa < 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if with_history:
        root = math.sqrt(kappa)
        factor = (root - 1.0) / (root + 1.0)
        c1 = factor * factor
        c23 = 4.0 / (spec.lambda_min * (root + 1.0) ** 2)
    else:
        factor = (kappa - 1.0) / (kappa + 1.0)
        c1 = 0.0
        c23 = 2.0 / (spec.lambda_min * (kappa + 1.0))
    return FixedCoefficients(c1=c1, c23=c23, alpha=alpha, predicted_factor=factor)


def check_history_supported(history: int) -> None:
    if history >= 2:
        raise ValueError(
            f"no closed-form stepsizes exist for {history} history directions; "
            "use subspace minimization instead"
        )


def kappa_from_eigsplit(s: EigSplit, alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    top = max(alpha * s.eta_fmax, alpha * s.eta_cmax + 1.0 - alpha)
    bottom = min(alpha * s.eta_fmin, alpha * s.eta_cmin + 1.0 - alpha)
    return top / bottom


def alpha_opt_eigsplit(s: EigSplit) -> tuple[float, float]:
    if s.eta_cmin > s.eta_fmin or s.eta_cmax > s.eta_fmax:
        raise ValueError(
            "optimal alpha needs eta_cmin <= eta_fmin and eta_cmax <= eta_fmax"
        )
    alpha = 1.0 / (1.0 + s.eta_fmin - s.eta_cmin)
    if s.eta_fmax - s.eta_fmin >= s.eta_cmax - s.eta_cmin:
        kappa = s.eta_fmax / s.eta_fmin
    else:
        kappa = 1.0 + (s.eta_cmax - s.eta_cmin) / s.eta_fmin
    return alpha, kappa


def alpha_top(s: EigSplit) -> float:
    """Alpha equalizing the two largest eigenvalues."""
    return 1.0 / (1.0 + s.eta_fmax - s.eta_cmax)


def eigsplit_from_prolongation(A: np.ndarray, P: np.ndarray, *, tol: float = 1e-8) -> EigSplit:
    """Split the eigenpairs of symmetric ``A`` by whether ``P`` spans the eigenvector."""
    eta, vecs = linalg.eigh(A)
    Q, _ = np.linalg.qr(P)
    in_range = np.linalg.norm(Q.T @ vecs, axis=0) > 1.0 - tol
    coarse, fine = eta[in_range], eta[~in_range]
    if coarse.size == 0 or fine.size == 0:
        raise ValueError("prolongation must span some but not all eigenvectors")
    return EigSplit(float(fine.max()), float(fine.min()), float(coarse.max()), float(coarse.min()))


def w_alpha_spectrum(
    A: np.ndarray,
    Phi: np.ndarray,
    P: np.ndarray,
    A_H: np.ndarray,
    alpha: float,
    *,
    R: np.ndarray | None = None,
) -> SpectrumSummary:
    """Extremes of ``W_alpha`` through the symmetric similarity ``S W S^{-1}``, ``S = sqrt(A)``."""
    S = linalg.sqrtm(A).real
    B = alpha * Phi + (1.0 - alpha) * _cgc_operator(P, A_H, R)
    sym = S @ B @ S
    eig = linalg.eigvalsh(0.5 * (sym + sym.T))
    return SpectrumSummary(float(eig.min()), float(eig.max()))
