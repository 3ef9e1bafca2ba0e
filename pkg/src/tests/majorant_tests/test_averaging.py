# src/tests/majorant_tests/test_averaging.py

import math

import numpy as np
import pytest

from src.core.errors import MajorantError
from src.core.fourier import cubic_hamiltonian_map, omegas
from src.core.majorant import (
    TruncatedMap,
    add,
    average_Lj,
    average_M,
    average_Mj,
    homological_solve,
    max_abs_difference,
    moser_f,
    random_sparse_map,
    rotate,
    rotation_weights,
    scale,
    sub,
    theta_derivative,
    zero,
)
from src.utils.logger import WorkbenchLogger


def _pair_map(rng, pairs=2, max_degree=4, n_terms=8):
    return random_sparse_map(rng, 2 * pairs, max_degree, n_terms=n_terms, n_out=1, min_degree=1, exact=False, pairs=pairs)


class TestTorusAverages:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_rotation_weights(self):
        F = TruncatedMap.scalar(4, 4, {(2, 0, 1, 1): 1.0}, pairs=2)
        assert rotation_weights(F, (2, 0, 1, 1)) == (1, -1)

    def test_averages_keep_invariant_monomials(self):
        F = TruncatedMap.scalar(4, 4, {(1, 0, 1, 0): 2.0, (1, 1, 0, 1): 3.0, (2, 0, 0, 0): 5.0}, pairs=2)
        assert average_M(F).components[0] == {(1, 0, 1, 0): 2.0}
        assert average_Mj(F, 0).components[0] == {(1, 0, 1, 0): 2.0}
        assert average_Mj(F, 1).components[0] == {(1, 0, 1, 0): 2.0, (1, 1, 0, 1): 3.0, (2, 0, 0, 0): 5.0}

    def test_averages_need_pairs(self):
        F = TruncatedMap.scalar(2, 3, {(1, 1): 1.0})
        with pytest.raises(MajorantError):
            average_M(F)
        with pytest.raises(MajorantError):
            average_Mj(TruncatedMap.scalar(2, 3, {(1, 1): 1.0}, pairs=1), 1)

    def test_average_matches_sampled_rotations(self, rng):
        """Mean over K equally spaced rotations equals M_j once K exceeds the degree"""
        self.logger.info("=== Testing M_j against sampled rotations ===")
        F = _pair_map(rng)
        samples = 8
        for j in range(2):
            total = zero(4, F.max_degree, n_out=1, pairs=2)
            for k in range(samples):
                thetas = np.zeros(2)
                thetas[j] = 2.0 * math.pi * k / samples
                total = add(total, rotate(F, thetas))
            assert max_abs_difference(scale(total, 1.0 / samples), average_Mj(F, j)) <= 1e-12

    def test_full_turn_is_identity(self, rng):
        F = _pair_map(rng)
        assert max_abs_difference(rotate(F, [2.0 * math.pi, 0.0]), F) <= 1e-12
        assert max_abs_difference(average_M(rotate(F, [0.3, -1.1])), average_M(F)) <= 1e-15
        with pytest.raises(MajorantError):
            rotate(F, [0.1])

    def test_weighted_average_quadrature(self):
        """L_j g = (1/2pi) int_0^{2pi} t g(phi_j^t) dt on a single monomial"""
        F = TruncatedMap.scalar(4, 3, {(2, 0, 1, 0): 1.0, (1, 0, 1, 0): 1.0}, pairs=2)
        lj = average_Lj(F, 0)
        assert lj.coefficient(0, (2, 0, 1, 0)) == pytest.approx(1.0 / 1j)
        assert lj.coefficient(0, (1, 0, 1, 0)) == pytest.approx(math.pi)

        samples = 20000
        t = 2.0 * math.pi * (np.arange(samples) + 0.5) / samples
        quadrature = np.mean(t * np.exp(1j * t))
        assert lj.coefficient(0, (2, 0, 1, 0)) == pytest.approx(quadrature, abs=1e-6)

    def test_derivative_of_weighted_average(self, rng):
        """d/dtheta_j L_j F = F - M_j F"""
        F = _pair_map(rng)
        for j in range(2):
            lhs = theta_derivative(average_Lj(F, j), j)
            rhs = sub(F, average_Mj(F, j))
            assert max_abs_difference(lhs, rhs) <= 1e-12


class TestMoserSolver:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    @pytest.mark.parametrize("pairs", [1, 2, 3])
    def test_recovers_potential(self, rng, pairs):
        self.logger.info(f"=== Testing moser_f with {pairs} pairs ===")
        f0 = _pair_map(rng, pairs=pairs)
        h = [theta_derivative(f0, j) for j in range(pairs)]
        f = moser_f(h)
        assert max_abs_difference(f, sub(f0, average_M(f0))) <= 1e-12
        for j in range(pairs):
            assert max_abs_difference(theta_derivative(f, j), h[j]) <= 1e-12

    def test_rejects_invariant_terms(self):
        h = [TruncatedMap.scalar(2, 3, {(1, 1): 1.0}, pairs=1)]
        with pytest.raises(MajorantError):
            moser_f(h)

    def test_rejects_incompatible_data(self):
        h0 = TruncatedMap.scalar(4, 3, {(1, 1, 0, 0): 1.0}, pairs=2)
        h1 = TruncatedMap.scalar(4, 3, {(1, 1, 0, 0): 2.0}, pairs=2)
        with pytest.raises(MajorantError):
            moser_f([h0, h1])
        with pytest.raises(MajorantError):
            moser_f([h0])
        with pytest.raises(MajorantError):
            moser_f([])


class TestHomologicalEquation:

    def setup_method(self):
        self.logger = WorkbenchLogger(self.__class__.__name__)

    def test_single_monomial(self):
        F = TruncatedMap.scalar(4, 3, {(1, 0, 0, 1): 2.0}, pairs=2)
        chi = homological_solve(F, [1.0, 2.0])
        assert chi.coefficient(0, (1, 0, 0, 1)) == pytest.approx(2.0 / (1j * -1.0))

    def test_solution_satisfies_equation(self, rng):
        F = _pair_map(rng)
        frequencies = np.array([1.0, math.sqrt(2.0)])
        F = sub(F, average_M(F))
        chi = homological_solve(F, frequencies)
        for exponent, coefficient in F.components[0].items():
            m = np.array(rotation_weights(F, exponent))
            assert 1j * float(frequencies @ m) * chi.coefficient(0, exponent) == pytest.approx(coefficient)

    def test_resonant_monomial_rejected(self):
        F = TruncatedMap.scalar(4, 3, {(1, 0, 1, 0): 1.0}, pairs=2)
        with pytest.raises(MajorantError):
            homological_solve(F, [1.0, 2.0])
        G = TruncatedMap.scalar(4, 3, {(2, 0, 0, 1): 1.0}, pairs=2)
        with pytest.raises(MajorantError):
            homological_solve(G, [1.0, 2.0])
        with pytest.raises(MajorantError):
            homological_solve(G, [1.0])

    @pytest.mark.parametrize("n", [3, 4, 5, 8])
    def test_cubic_hamiltonian_is_non_resonant(self, n):
        cubic = cubic_hamiltonian_map(n)
        chi = homological_solve(cubic, omegas(n))
        assert chi.term_count() == cubic.term_count()
        self.logger.info(f"✅ H_1 has no resonant monomial for N={n}")
