# src/tests/spectral_tests/test_projectors.py

import numpy as np
import pytest

from src.core.errors import SpectralError
from src.core.spectral import (
    FlaschkaCoords,
    contour_radius,
    eigen_doubled,
    free_eigenvector,
    free_projector,
    projector,
    projector_contour,
    transform_u,
    transform_u_series,
)
from src.tests.test_data import random_flaschka
from src.utils.logger import WorkbenchLogger


class TestFreeProjectors:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("n, j", [(4, 0), (4, 1), (4, 2), (4, 4), (7, 3)])
    def test_rank_and_idempotency(self, n, j):
        P0 = free_projector(n, j)
        rank = 1 if j in (0, n) else 2
        assert np.trace(P0) == pytest.approx(rank)
        np.testing.assert_allclose(P0 @ P0, P0, atol=1e-14)
        np.testing.assert_allclose(P0, P0.T, atol=1e-15)

    def test_eigenvectors_lie_in_range(self):
        n, j = 6, 2
        P0 = free_projector(n, j)
        for m in (j, -j):
            g = free_eigenvector(n, m)
            np.testing.assert_allclose(P0 @ g, g, atol=1e-14)
        np.testing.assert_allclose(P0 @ free_eigenvector(n, 1), 0.0, atol=1e-14)

    def test_contour_radius(self):
        assert contour_radius(8, 0) == pytest.approx(1.0 / 128.0)
        assert contour_radius(8, 1) == pytest.approx(1.0 / 128.0)
        assert contour_radius(8, 4) == pytest.approx(4.0 / 128.0)
        assert contour_radius(8, 7) == pytest.approx(1.0 / 128.0)


class TestEigenProjectors:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("n", [4, 5, 8])
    def test_zero_coordinates_give_free_projectors(self, n):
        self.logger.info(f"=== Testing P_j(0) = P_j0 for N={n} ===")
        f = FlaschkaCoords.zeros(n)
        for j in range(n + 1):
            np.testing.assert_allclose(projector(f, j), free_projector(n, j), atol=1e-10)

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_idempotent_and_rank(self, rng, n):
        f = random_flaschka(rng, n, amplitude=1e-3)
        spectrum = eigen_doubled(f)
        for j in range(n + 1):
            P = projector(f, j, spectrum)
            np.testing.assert_allclose(P @ P, P, atol=1e-10)
            assert np.trace(P) == pytest.approx(1 if j in (0, n) else 2, abs=1e-10)

    def test_projectors_sum_to_identity(self, rng):
        n = 6
        f = random_flaschka(rng, n, amplitude=1e-2)
        spectrum = eigen_doubled(f)
        total = sum(projector(f, j, spectrum) for j in range(n + 1))
        np.testing.assert_allclose(total, np.eye(2 * n), atol=1e-12)

    def test_degenerate_neighbours_rejected(self):
        """A spectrum whose cluster j = 1 touches cluster j = 2 is refused"""
        n = 4
        f = FlaschkaCoords.zeros(n)
        spectrum = eigen_doubled(f)
        lambdas = spectrum.lambdas.copy()
        lambdas[3] = lambdas[2]
        collided = type(spectrum)(n, lambdas, spectrum.gaps, spectrum.eigvecs, spectrum.residual)
        with pytest.raises(SpectralError):
            projector(f, 1, collided)


class TestContourProjectors:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("n", [4, 8])
    def test_zero_coordinates(self, n):
        f = FlaschkaCoords.zeros(n)
        for j in range(n + 1):
            np.testing.assert_allclose(projector_contour(f, j, 64), free_projector(n, j), atol=1e-10)

    @pytest.mark.parametrize("n", [4, 8])
    def test_agrees_with_eigen_projector(self, rng, n):
        self.logger.info(f"=== Testing contour vs eigenvector projectors N={n} ===")
        f = random_flaschka(rng, n, amplitude=1e-4)
        spectrum = eigen_doubled(f)
        for j in range(n + 1):
            contour = projector_contour(f, j, 64)
            np.testing.assert_allclose(contour, projector(f, j, spectrum), atol=1e-8)
            np.testing.assert_allclose(contour @ contour, contour, atol=1e-10)

    def test_quadrature_self_convergence(self):
        """Shifted free matrix: the exact projector is P_j0 and the error decays geometrically in M"""
        n, j = 4, 1
        delta = 0.3 * contour_radius(n, j)
        f = FlaschkaCoords(n, delta * np.ones(n), np.zeros(n))
        exact = free_projector(n, j)
        err_16 = float(np.max(np.abs(projector_contour(f, j, 16) - exact)))
        err_32 = float(np.max(np.abs(projector_contour(f, j, 32) - exact)))
        self.logger.numeric_check("contour error M=16", err_16, 1e-6)
        self.logger.numeric_check("contour error M=32", err_32, 1e-12)
        assert err_16 < 1e-6
        assert err_32 < 1e-12
        assert err_32 < err_16

    def test_too_few_points_rejected(self):
        with pytest.raises(SpectralError):
            projector_contour(FlaschkaCoords.zeros(4), 1, 8)

    def test_complex_coordinates_use_contour(self, rng):
        n = 5
        b = 1e-4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        a = 1e-4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        f = FlaschkaCoords(n, b, a)
        for j in range(n + 1):
            P = projector(f, j)
            assert np.iscomplexobj(P)
            np.testing.assert_allclose(P @ P, P, atol=1e-9)
            np.testing.assert_allclose(P, free_projector(n, j), atol=1e-2)


class TestTransformationOperator:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_zero_coordinates(self):
        n = 6
        f = FlaschkaCoords.zeros(n)
        for j in range(1, n):
            np.testing.assert_allclose(transform_u(f, j), free_projector(n, j), atol=1e-10)

    @pytest.mark.parametrize("n", [4, 8])
    def test_isometry_on_free_range(self, rng, n):
        self.logger.info(f"=== Testing U_j isometry N={n} ===")
        f = random_flaschka(rng, n, amplitude=1e-3)
        spectrum = eigen_doubled(f)
        for j in range(1, n):
            U = transform_u(f, j, spectrum)
            P = projector(f, j, spectrum)
            for g in (free_eigenvector(n, j), free_eigenvector(n, -j)):
                image = U @ g
                assert np.linalg.norm(image) == pytest.approx(1.0, abs=1e-12)
                np.testing.assert_allclose(P @ image, image, atol=1e-12)
                np.testing.assert_allclose(np.conj(U @ g), U @ np.conj(g), atol=1e-14)

    @pytest.mark.parametrize("n", [4, 8])
    def test_series_matches_closed_form(self, rng, n):
        f = random_flaschka(rng, n, amplitude=1e-3)
        spectrum = eigen_doubled(f)
        for j in range(1, n):
            np.testing.assert_allclose(
                transform_u_series(f, j, spectrum=spectrum), transform_u(f, j, spectrum), atol=1e-12
            )

    def test_complex_coordinates(self, rng):
        n = 4
        b = 1e-4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        a = 1e-4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        f = FlaschkaCoords(n, b, a)
        for j in range(1, n):
            U = transform_u(f, j)
            np.testing.assert_allclose(U, free_projector(n, j), atol=1e-2)
            np.testing.assert_allclose(projector(f, j) @ U, U, atol=1e-9)
