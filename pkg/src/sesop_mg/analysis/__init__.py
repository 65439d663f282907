"""Convergence analysis: dense fixed-step theory and local Fourier analysis."""

from .lfa import (
    CoarseMode,
    FrequencyPartition,
    KappaOptimum,
    TwoGridSymbolSample,
    fixed_step_factor,
    h_ellipticity,
    ideal_factors,
    kappa_of_alpha,
    minimize_kappa,
    ordinary_coefficients,
    symbol,
    two_grid_symbol,
)
from .tg import (
    EigSplit,
    FixedCoefficients,
    SpectrumSummary,
    alpha_opt_eigsplit,
    gamma_dense,
    kappa_from_eigsplit,
    optimal_coefficients,
    upsilon_spectral_radius,
    w_alpha_dense,
)

__all__ = [
    "CoarseMode",
    "EigSplit",
    "FixedCoefficients",
    "FrequencyPartition",
    "KappaOptimum",
    "SpectrumSummary",
    "TwoGridSymbolSample",
    "alpha_opt_eigsplit",
    "fixed_step_factor",
    "gamma_dense",
    "h_ellipticity",
    "ideal_factors",
    "kappa_from_eigsplit",
    "kappa_of_alpha",
    "minimize_kappa",
    "optimal_coefficients",
    "ordinary_coefficients",
    "symbol",
    "two_grid_symbol",
    "upsilon_spectral_radius",
    "w_alpha_dense",
]
