# src/tests/spectral_tests/test_z_map.py

import math

import numpy as np
import pytest

from src.core.errors import SpectralError
from src.core.fourier import ModeCoords, dft, omegas
from src.core.spectral import (
    FlaschkaCoords,
    build_doubled_jacobi,
    d_factor,
    doubled_perturbation,
    dtheta_xi_zero,
    dz_zero,
    eigen_doubled,
    flaschka_fourier,
    free_eigenvector,
    matrix_element,
    psi_map,
    z2_taylor,
    z_map,
)
from src.tests.test_data import (
    FD_STEP,
    FD_TOL,
    GAP_IDENTITY_N_VALUES,
    GAP_IDENTITY_RTOL,
    GAP_IDENTITY_SAMPLES,
    random_flaschka,
    random_xy,
)
from src.utils.logger import WorkbenchLogger


def _linear_part(f):
    b_hat, a_hat = flaschka_fourier(f)
    return dz_zero(f.n) @ np.concatenate([b_hat, a_hat])


class TestZMap:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_origin(self):
        coords = z_map(FlaschkaCoords.zeros(6))
        np.testing.assert_allclose(coords.as_vector(), 0.0, atol=1e-14)

    def test_d_factor(self):
        assert d_factor(4, 2) == pytest.approx(1.0)
        assert d_factor(8, 4) == pytest.approx(math.sqrt(2.0))

    @pytest.mark.parametrize("n", [4, 7])
    def test_real_data_give_conjugate_pairs(self, rng, n):
        coords = z_map(random_flaschka(rng, n, amplitude=1e-3))
        np.testing.assert_allclose(coords.w, np.conj(coords.z), atol=1e-12)

    @pytest.mark.parametrize("n", GAP_IDENTITY_N_VALUES)
    def test_gap_identity(self, rng, n):
        """gamma_j^2 = (8/N) omega_j |z_j|^2 for real constrained data"""
        self.logger.info(f"=== Testing gap identity N={n} ===")
        w = omegas(n)
        worst = 0.0
        for _ in range(GAP_IDENTITY_SAMPLES):
            f = random_flaschka(rng, n, amplitude=1e-3)
            gaps = eigen_doubled(f).gaps
            coords = z_map(f)
            lhs = gaps**2
            rhs = (8.0 / n) * w * np.abs(coords.z) ** 2
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.maximum(lhs, 1e-12))))
        assert self.logger.numeric_check(f"gap identity N={n}", worst, GAP_IDENTITY_RTOL)

    @pytest.mark.parametrize("n", [4, 16])
    def test_cluster_gaps_agree_with_eigenvalue_differences(self, rng, n):
        f = random_flaschka(rng, n, amplitude=1e-2)
        spectrum = eigen_doubled(f)
        differences = spectrum.lambdas[2 : 2 * n - 1 : 2] - spectrum.lambdas[1 : 2 * n - 2 : 2]
        np.testing.assert_allclose(spectrum.gaps, differences, rtol=1e-6, atol=1e-13)

    def test_complex_data_close_to_linearization(self, rng):
        n = 4
        eps = 1e-5
        b = eps * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        a = eps * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        f = FlaschkaCoords(n, b, a)
        linear = _linear_part(f)
        assert np.max(np.abs(z_map(f).as_vector() - linear)) <= 1e-3 * np.max(np.abs(linear))


class TestZDifferential:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_dz_matches_finite_differences(self, rng, n):
        self.logger.info(f"=== Testing dZ(0) against central differences N={n} ===")
        direction = FlaschkaCoords(n, rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n))
        h = FD_STEP
        fd = (z_map(direction.scaled(h)).as_vector() - z_map(direction.scaled(-h)).as_vector()) / (2.0 * h)
        error = float(np.max(np.abs(fd - _linear_part(direction))))
        self.logger.numeric_check("dZ FD error", error, FD_TOL)
        assert error <= FD_TOL

    @pytest.mark.parametrize("n", [2, 4, 9, 16])
    def test_dz_inverts_dtheta(self, n):
        product = dz_zero(n) @ dtheta_xi_zero(n)
        np.testing.assert_allclose(product, -np.eye(2 * (n - 1)), atol=1e-12)

    def test_dz_shape_validation(self):
        assert dz_zero(5).shape == (8, 10)
        with pytest.raises(SpectralError):
            dz_zero(1)


class TestSecondOrder:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("n", [4, 6])
    def test_matrix_element_against_dense_product(self, rng, n):
        """x_m^l equals g_{m-2l}^H L_p g_m for the perturbation L_p = L(b, a) - L(0, 0)"""
        b = rng.uniform(-1.0, 1.0, n)
        a = rng.uniform(-1.0, 1.0, n)
        coords = FlaschkaCoords(n, b, a)
        perturbation = doubled_perturbation(coords)
        np.testing.assert_allclose(
            perturbation, build_doubled_jacobi(coords) - build_doubled_jacobi(FlaschkaCoords.zeros(n)), atol=1e-15
        )
        b_hat, a_hat = dft(b), dft(a)
        for m in range(-n + 1, n + 1):
            for l in range(-n, n):
                dense = np.vdot(free_eigenvector(n, m - 2 * l), perturbation @ free_eigenvector(n, m))
                assert matrix_element(b_hat, a_hat, m, l) == pytest.approx(dense, abs=1e-13)

    def test_matrix_element_periodic_in_l(self, rng):
        n = 5
        b_hat = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a_hat = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for l in range(n):
            assert matrix_element(b_hat, a_hat, 2, l + n) == pytest.approx(matrix_element(b_hat, a_hat, 2, l))

    def test_second_order_vanishes_at_zero(self):
        coords = z2_taylor(5, np.zeros(5), np.zeros(5))
        np.testing.assert_array_equal(coords.as_vector(), np.zeros(8))
        with pytest.raises(SpectralError):
            z2_taylor(5, np.zeros(4), np.zeros(5))

    def test_taylor_remainder_is_third_order(self, rng):
        """Remainder of Z after the linear and quadratic terms halves by a factor 8 with eps"""
        self.logger.info("=== Testing Z Taylor remainder order ===")
        n = 8
        v = FlaschkaCoords(n, rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n))
        b_hat, a_hat = flaschka_fourier(v)
        linear = _linear_part(v)
        quadratic = z2_taylor(n, b_hat, a_hat).as_vector()

        def remainder(eps):
            value = z_map(v.scaled(eps)).as_vector()
            return float(np.max(np.abs(value - eps * linear - eps**2 * quadratic)))

        slope = math.log2(remainder(2e-3) / remainder(1e-3))
        self.logger.info(f"🔍 Richardson slope {slope:.3f}")
        assert slope == pytest.approx(3.0, abs=0.2)


class TestPsiMap:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_origin(self):
        out = psi_map(ModeCoords.zeros(5))
        np.testing.assert_allclose(out.as_vector(), 0.0, atol=1e-14)

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_differential_is_identity(self, rng, n):
        self.logger.info(f"=== Testing dPsi(0) = Id for N={n} ===")
        direction = random_xy(rng, n).to_modes()
        h = FD_STEP
        plus = psi_map(ModeCoords(n, h * direction.xi, h * direction.eta))
        minus = psi_map(ModeCoords(n, -h * direction.xi, -h * direction.eta))
        fd = (plus.as_vector() - minus.as_vector()) / (2.0 * h)
        error = float(np.max(np.abs(fd - direction.as_vector())))
        self.logger.numeric_check("dPsi FD error", error, FD_TOL)
        assert error <= FD_TOL

    def test_real_modes_stay_real(self, rng):
        out = psi_map(random_xy(rng, 6, amplitude=1e-3).to_modes())
        np.testing.assert_allclose(out.eta, np.conj(out.xi), atol=1e-12)
