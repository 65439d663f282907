"""Tests for sesop_mg.analysis.tg."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sesop_mg.analysis.tg import (
    EigSplit,
    FixedCoefficients,
    SpectrumSummary,
    alpha_opt_eigsplit,
    c1_minimizer,
    check_history_supported,
    eigsplit_from_prolongation,
    gamma_dense,
    kappa_from_eigsplit,
    meeting_point_c23,
    optimal_coefficients,
    r_hat,
    upsilon_dense,
    upsilon_spectral_radius,
    w_alpha_dense,
    w_alpha_spectrum,
)
from sesop_mg.grid import assemble_dense, mesh_size
from sesop_mg.problems import rotated_stencil
from sesop_mg.transfer import TransferPair


def random_spd(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(rng.uniform(0.5, 3.0, n)) @ Q.T


def spd_with_eigenvalues(eta: list[float], seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((len(eta), len(eta))))
    return Q @ np.diag(eta) @ Q.T, Q


class TestFixedCoefficients:
    def test_weights_split(self):
        c = FixedCoefficients(c1=0.1, c23=0.8, alpha=0.25)
        assert c.c2 == pytest.approx(0.2)
        assert c.c3 == pytest.approx(0.6)

    def test_from_weights_round_trip(self):
        c = FixedCoefficients.from_weights(0.1, 0.3, 0.5)
        assert c.c23 == pytest.approx(0.8)
        assert c.alpha == pytest.approx(0.375)
        assert c.as_dict()["c3"] == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError, match="c1"):
            FixedCoefficients(c1=-0.1, c23=1.0)
        with pytest.raises(ValueError, match="alpha"):
            FixedCoefficients(c1=0.0, c23=1.0, alpha=1.5)


class TestSpectrumSummary:
    def test_kappa_and_mu(self):
        s = SpectrumSummary(2.0, 8.0)
        assert s.kappa == pytest.approx(4.0)
        assert s.mu == pytest.approx(0.6)

    def test_validation(self):
        with pytest.raises(ValueError, match="lambda_min"):
            SpectrumSummary(0.0, 1.0)
        with pytest.raises(ValueError, match="kappa < 1"):
            SpectrumSummary(2.0, 1.0)


class TestOptimalCoefficients:
    def test_kappa_four_with_history(self):
        c = optimal_coefficients(SpectrumSummary(2.0, 8.0), with_history=True)
        assert c.c1 == pytest.approx(1 / 9)
        assert c.c23 == pytest.approx(2 / 9)
        assert c.predicted_factor == pytest.approx(1 / 3)

    def test_kappa_four_without_history(self):
        c = optimal_coefficients(SpectrumSummary(2.0, 8.0), with_history=False)
        assert c.c1 == 0.0
        assert c.c23 == pytest.approx(1 / 5)
        assert c.predicted_factor == pytest.approx(3 / 5)

    def test_kappa_one_converges_in_one_step(self):
        c = optimal_coefficients(SpectrumSummary(1.5, 1.5), with_history=True)
        assert c.c1 == 0.0
        assert c.predicted_factor == 0.0

    def test_anisotropic_ideal_kappa(self):
        c = optimal_coefficients(SpectrumSummary(1.0, 6.81), with_history=True)
        assert c.predicted_factor == pytest.approx(0.446, abs=1e-3)

    @pytest.mark.parametrize("kappa", [1.5, 4.0, 20.0])
    def test_c23_is_the_meeting_point(self, kappa):
        spectrum = SpectrumSummary(0.7, 0.7 * kappa)
        c = optimal_coefficients(spectrum, with_history=True)
        assert c.c23 == pytest.approx(meeting_point_c23(c.c1, spectrum))
        b_min = 1 + c.c1 - c.c23 * spectrum.lambda_min
        b_max = 1 + c.c1 - c.c23 * spectrum.lambda_max
        assert b_min == pytest.approx(-b_max, abs=1e-12)

    @pytest.mark.parametrize("kappa", [1.5, 4.0, 20.0])
    def test_c1_kills_the_discriminant(self, kappa):
        spectrum = SpectrumSummary(1.0, kappa)
        c = optimal_coefficients(spectrum, with_history=True)
        mu = spectrum.mu
        assert mu**2 * (1 + c.c1) ** 2 - 4 * c.c1 == pytest.approx(0.0, abs=1e-10)
        assert c1_minimizer(mu)[0] == pytest.approx(c.c1)

    def test_no_better_c1_on_a_grid(self):
        spectrum = SpectrumSummary(1.0, 4.0)
        best = optimal_coefficients(spectrum, with_history=True).predicted_factor
        lam = np.linspace(spectrum.lambda_min, spectrum.lambda_max, 201)
        for c1 in np.arange(0.0, 1.0, 1e-3):
            c23 = meeting_point_c23(c1, spectrum)
            assert r_hat(c1, c23, lam).max() >= best - 1e-9

    def test_matches_brute_force_on_dense_systems(self):
        for seed in range(5):
            A = random_spd(6, seed)
            eig = np.linalg.eigvalsh(A)
            c = optimal_coefficients(SpectrumSummary(eig.min(), eig.max()), with_history=True)
            best = math.inf
            for c1 in np.linspace(0.0, 0.9, 46):
                for c23 in np.linspace(0.01, 2.0 / eig.min(), 80):
                    best = min(best, upsilon_spectral_radius(1 + c1 - c23 * eig, c1))
            assert c.predicted_factor <= best + 2e-2
            rho = upsilon_spectral_radius(1 + c.c1 - c.c23 * eig, c.c1)
            assert rho == pytest.approx(c.predicted_factor, abs=1e-8)


class TestUpsilon:
    def test_no_history_is_max_abs(self):
        assert upsilon_spectral_radius([0.5, -0.8, 0.2], 0.0) == pytest.approx(0.8)

    def test_complex_roots_have_modulus_sqrt_c1(self):
        assert upsilon_spectral_radius([0.1, -0.2], 0.25) == pytest.approx(0.5)

    def test_empty(self):
        assert upsilon_spectral_radius([], 0.3) == 0.0

    def test_matches_block_companion_spectrum(self):
        rng = np.random.default_rng(7)
        M = rng.standard_normal((10, 10))
        gamma = 0.5 * (M + M.T) / 4
        c1 = float(rng.uniform(0.0, 0.5))
        dense = np.abs(np.linalg.eigvals(upsilon_dense(gamma, c1))).max()
        b = np.linalg.eigvalsh(gamma)
        assert upsilon_spectral_radius(b, c1) == pytest.approx(dense, abs=1e-8)

    def test_r_hat_peaks_at_endpoints(self):
        c1, c23 = 0.2, 0.25
        lam = np.linspace(1.0, 9.0, 2001)
        values = r_hat(c1, c23, lam)
        assert values.max() == pytest.approx(max(values[0], values[-1]))


class TestDenseOperators:
    def setup_method(self):
        n = 7
        self.A = assemble_dense(rotated_stencil(0.1, math.pi / 6, mesh_size(n)), n)
        t = TransferPair.for_fine(n)
        self.P = t.prolongation_matrix.toarray()
        self.R = t.restriction_matrix.toarray()
        self.A_H = self.R @ self.A @ self.P
        self.Phi = np.diag(1.0 / np.diag(self.A))

    def test_w_alpha_at_one_with_identity_is_a(self):
        W = w_alpha_dense(self.A, np.eye(len(self.A)), self.P, self.A_H, 1.0, R=self.R)
        np.testing.assert_allclose(W, self.A)

    @pytest.mark.parametrize("alpha", [1e-3, 0.3, 0.9])
    def test_w_alpha_eigenvalues_real_and_positive(self, alpha):
        W = w_alpha_dense(self.A, self.Phi, self.P, self.A_H, alpha, R=self.R)
        eig = np.linalg.eigvals(W)
        assert np.abs(eig.imag).max() < 1e-8
        assert eig.real.min() > 0

    def test_small_alpha_clusters_at_zero_and_one(self):
        W = w_alpha_dense(self.A, self.Phi, self.P, self.A_H, 1e-6, R=self.R)
        eig = np.linalg.eigvals(W).real
        coarse = eig[eig > 0.5]
        assert coarse.size == self.A_H.shape[0]
        np.testing.assert_allclose(coarse, 1.0, atol=1e-3)
        assert eig[eig <= 0.5].max() < 1e-3

    def test_w_alpha_spectrum_matches_eigvals(self):
        alpha = 0.4
        eig = np.linalg.eigvals(w_alpha_dense(self.A, self.Phi, self.P, self.A_H, alpha, R=self.R)).real
        spectrum = w_alpha_spectrum(self.A, self.Phi, self.P, self.A_H, alpha, R=self.R)
        assert spectrum.lambda_min == pytest.approx(eig.min(), rel=1e-8)
        assert spectrum.lambda_max == pytest.approx(eig.max(), rel=1e-8)

    def test_gamma_with_zero_coefficients_is_identity(self):
        c = FixedCoefficients(c1=0.0, c23=0.0)
        G = gamma_dense(self.A, self.Phi, self.P, self.A_H, c, R=self.R)
        np.testing.assert_allclose(G, np.eye(len(self.A)))

    def test_gamma_is_symmetrizable(self):
        from scipy import linalg

        c = FixedCoefficients(c1=0.1, c23=0.5, alpha=0.4)
        G = gamma_dense(self.A, self.Phi, self.P, self.A_H, c, R=self.R)
        S = linalg.sqrtm(self.A).real
        sym = S @ G @ np.linalg.inv(S)
        np.testing.assert_allclose(sym, sym.T, atol=1e-8)

    def test_w_alpha_rejects_bad_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            w_alpha_dense(self.A, self.Phi, self.P, self.A_H, 0.0)


class TestEigSplit:
    def test_kappa_formula(self):
        s = EigSplit(eta_fmax=4.0, eta_fmin=3.0, eta_cmax=2.0, eta_cmin=1.0)
        assert kappa_from_eigsplit(s, 1.0) == pytest.approx(4.0)
        assert kappa_from_eigsplit(s, 1 / 3) == pytest.approx(4 / 3)

    @pytest.mark.parametrize("fmax", [4.0, 3.5])
    def test_optimal_alpha_beats_a_scan(self, fmax):
        s = EigSplit(eta_fmax=fmax, eta_fmin=3.0, eta_cmax=2.0, eta_cmin=1.0)
        alpha, kappa = alpha_opt_eigsplit(s)
        assert alpha == pytest.approx(1 / 3)
        assert kappa == pytest.approx(4 / 3)
        scan = min(kappa_from_eigsplit(s, a) for a in np.arange(1e-4, 1.0, 1e-4))
        assert kappa <= scan + 1e-3

    def test_hypotheses_enforced(self):
        with pytest.raises(ValueError, match="optimal alpha"):
            alpha_opt_eigsplit(EigSplit(eta_fmax=4.0, eta_fmin=1.0, eta_cmax=2.0, eta_cmin=1.5))
        with pytest.raises(ValueError):
            EigSplit(eta_fmax=1.0, eta_fmin=2.0, eta_cmax=1.0, eta_cmin=0.5)

    def test_coarse_correction_is_a_projection(self):
        A, Q = spd_with_eigenvalues(list(np.linspace(0.5, 3.0, 10)), seed=3)
        P = Q[:, :4]
        c = FixedCoefficients.from_weights(0.0, 0.0, 1.0)
        G = gamma_dense(A, np.eye(10), P, P.T @ A @ P, c)
        eig = np.sort(np.linalg.eigvals(G).real)
        np.testing.assert_allclose(eig[:4], 0.0, atol=1e-8)
        np.testing.assert_allclose(eig[4:], 1.0, atol=1e-8)

    def test_smallest_eigenvectors_give_kappa_below_two(self):
        eta = [0.5, 0.6, 0.7, 1.0, 1.1, 1.2, 1.3, 1.4]
        A, Q = spd_with_eigenvalues(eta, seed=5)
        P = Q[:, :3]
        split = eigsplit_from_prolongation(A, P)
        assert split.eta_fmax == pytest.approx(1.4)
        assert split.eta_fmin == pytest.approx(1.0)
        assert split.eta_cmax == pytest.approx(0.7)
        assert split.eta_cmin == pytest.approx(0.5)
        alpha, kappa = alpha_opt_eigsplit(split)
        assert kappa < 2.0
        dense = w_alpha_spectrum(A, np.eye(8), P, P.T @ A @ P, alpha, R=P.T)
        assert dense.kappa == pytest.approx(kappa, rel=1e-6)


def test_history_two_has_no_closed_form():
    check_history_supported(1)
    with pytest.raises(ValueError, match="no closed-form"):
        check_history_supported(2)
