import tracemalloc

import numpy as np
import pytest

from ultrawigner import (ArgumentError, CapacityError, CoefficientSequence, DomainError, HermiteSeries,
                         PreconditionError, WeightFunction, ambiguity_norm_comparison,
                         ambiguity_of_coefficients, fourier_2d, isometry_ratio, krasikov_check,
                         laguerre_values, marginals, pure_norm_comparison, pure_state_density,
                         radial_bound_check, radial_modulus, special_hermite,
                         special_hermite_integral, special_hermite_integral_matrix, special_hermite_matrix,
                         symmetric_grid, synthesize, tilde_rescale, wigner_norm_comparison, wigner_of_density,
                         wigner_pure_direct)
from ultrawigner.errors import ConventionError
from ultrawigner.phase_space import TILDE, PhaseSpaceGrid


class TestLaguerre:

    def test_low_degrees(self):
        x = np.linspace(0, 10, 21)
        values = laguerre_values(2, 1, x)
        np.testing.assert_allclose(values[0], 1.0)
        np.testing.assert_allclose(values[1], 2.0 - x)
        np.testing.assert_allclose(values[2], 0.5 * x ** 2 - 3.0 * x + 3.0, atol=1e-12)

    def test_high_degree_is_finite(self):
        values = laguerre_values(1500, 10, np.array([0.0, 1.0, 500.0]))
        assert np.all(np.isfinite(values))

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            laguerre_values(3, 0, [-1.0])

    def test_capacity(self):
        with pytest.raises(CapacityError):
            laguerre_values(5000, 0, [1.0])


class TestSpecialHermite:

    def test_ground_pair(self):
        q, p = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-3, 3, 7))
        np.testing.assert_allclose(special_hermite(0, 0, q, p), np.exp(-q ** 2 - p ** 2) / np.pi, rtol=1e-14)

    def test_origin_values(self):
        for n in (0, 1, 7, 50):
            assert special_hermite(n, n, 0.0, 0.0) == pytest.approx((-1) ** n / np.pi, rel=1e-12)

    def test_conjugate_symmetry(self):
        q, p = 0.7, -1.3
        for m, n in [(3, 1), (10, 4), (6, 0)]:
            assert special_hermite(n, m, q, p) == pytest.approx(np.conj(special_hermite(m, n, q, p)), rel=1e-13)

    def test_matrix_matches_single_entries(self):
        q, p = np.array([0.3, -1.1]), np.array([0.9, 0.2])
        matrix = special_hermite_matrix(8, q, p)
        for m, n in [(0, 0), (5, 2), (2, 5), (8, 8), (8, 0)]:
            np.testing.assert_allclose(matrix[m, n], special_hermite(m, n, q, p), rtol=1e-13, atol=1e-16)

    @pytest.mark.parametrize('q,p', [(0.0, 0.0), (0.4, -0.7), (-1.5, 1.2), (2.5, 0.3)])
    def test_matches_integral_definition(self, q, p):
        oracle = special_hermite_integral_matrix(6, q, p)
        closed = special_hermite_matrix(6, q, p)
        np.testing.assert_allclose(closed, oracle, atol=1e-10)

    def test_single_integral_entry(self):
        oracle = special_hermite_integral(2, 1, 0.4, -0.7)
        assert oracle == pytest.approx(special_hermite(2, 1, 0.4, -0.7), abs=1e-10)

    def test_integral_oracle_batches_points(self):
        q, p = np.array([0.4, -1.5, 2.5]), np.array([-0.7, 1.2, 0.3])
        batch = special_hermite_integral_matrix(5, q, p)
        assert batch.shape == (3, 6, 6)
        np.testing.assert_allclose(batch, np.moveaxis(special_hermite_matrix(5, q, p), -1, 0), atol=1e-10)

    def test_integral_oracle_is_limited(self):
        with pytest.raises(ArgumentError):
            special_hermite_integral_matrix(100, 0.0, 0.0)

    def test_radial_modulus(self):
        r = np.linspace(0, 5, 11)
        q, p = r * np.cos(0.3), r * np.sin(0.3)
        np.testing.assert_allclose(radial_modulus(7, 3, r), np.abs(special_hermite(7, 3, q, p)), rtol=1e-12,
                                   atol=1e-300)
        assert radial_modulus(3, 7, 1.5) == pytest.approx(radial_modulus(7, 3, 1.5))


class TestBounds:

    def test_radial_bound(self):
        report = radial_bound_check(10, np.linspace(0, 11, 881))
        assert report.verdict == 'pass'
        assert report.K >= 1 / np.pi - 1e-12
        assert report.slack(3, 5) >= 0
        assert 0 <= report.worst_radius <= 11
        assert report.to_dict()['worst_radius'] == report.worst_radius
        assert report.to_dict()['verdict'] == 'pass'

    def test_radial_grid_must_reach(self):
        with pytest.raises(ArgumentError):
            radial_bound_check(10, np.linspace(0, 5, 101))
        with pytest.raises(ArgumentError):
            radial_bound_check(2, np.linspace(0.5, 12, 101))

    def test_krasikov(self):
        report = krasikov_check(n_max=20, alpha_max=5)
        assert report.holds
        assert report.worst[0] >= 1
        assert report.to_dict()['holds'] is True


class TestWigner:

    def test_ground_state_origin(self):
        grid = wigner_of_density(pure_state_density(CoefficientSequence.unit(0)))
        assert grid.value_at(0.0, 0.0) == pytest.approx(1 / np.pi, rel=1e-14)
        assert grid.imag_residue < 1e-15

    def test_matches_direct_integral(self, random_state):
        alpha = random_state(4)
        axis = np.linspace(-2, 2, 5)
        grid = wigner_of_density(pure_state_density(alpha), axis, axis)
        direct = wigner_pure_direct(HermiteSeries(alpha), axis, axis)
        np.testing.assert_allclose(grid.values, direct.values, atol=1e-10)

    def test_real_for_hermitian_input(self, random_state):
        grid = wigner_of_density(pure_state_density(random_state(10)))
        assert grid.imag_residue < 1e-12

    def test_marginals(self, random_state):
        alpha = random_state(6)
        grid = wigner_of_density(pure_state_density(alpha))
        q_marginal, p_marginal = marginals(grid)
        series = HermiteSeries(alpha)
        np.testing.assert_allclose(q_marginal, np.abs(series(grid.q_axis)) ** 2, atol=1e-6)
        np.testing.assert_allclose(p_marginal, np.abs(series.fourier()(grid.p_axis)) ** 2, atol=1e-6)

    def test_tilde_rescale(self):
        grid = wigner_of_density(pure_state_density(CoefficientSequence.unit(0)), [-1.0, 0.0, 1.0], [0.0])
        tilde = tilde_rescale(grid)
        assert tilde.convention == TILDE
        np.testing.assert_allclose(tilde.q_axis, np.sqrt(2) * grid.q_axis)
        assert tilde.value_at(0.0, 0.0) == pytest.approx(0.5 / np.pi)
        with pytest.raises(ConventionError):
            tilde_rescale(tilde)

    def test_grid_validation(self):
        with pytest.raises(ArgumentError):
            PhaseSpaceGrid([1.0, 0.0], [0.0], np.zeros((2, 1)))
        with pytest.raises(ConventionError):
            PhaseSpaceGrid([0.0], [0.0], np.zeros((1, 1)), convention='weyl')

    @pytest.mark.parametrize('n', [0, 3])
    def test_isometry(self, n):
        assert isometry_ratio(CoefficientSequence.unit(n)) == pytest.approx(1 / (4 * np.pi), rel=1e-6)

    def test_isometry_mixed_coefficients(self, random_state):
        assert isometry_ratio(random_state(5)) == pytest.approx(1 / (4 * np.pi), rel=1e-6)


class TestAmbiguity:

    def test_origin(self, random_state):
        alpha = random_state(6)
        grid = ambiguity_of_coefficients(alpha, [0.0], [0.0])
        assert grid.values[0, 0] == pytest.approx(1 / (2 * np.pi), rel=1e-12)

    def test_fourier_of_wigner(self, random_state):
        alpha = random_state(5)
        wigner = wigner_of_density(pure_state_density(alpha))
        theta = np.linspace(-3, 3, 7)
        numeric = fourier_2d(wigner, theta, theta)
        exact = ambiguity_of_coefficients(alpha, theta, theta)
        np.testing.assert_allclose(numeric.values, exact.values, atol=1e-6)

    def test_ground_state_closed_form(self):
        theta = np.linspace(-4, 4, 9)
        grid = ambiguity_of_coefficients(CoefficientSequence.unit(0), theta, theta)
        t, v = np.meshgrid(theta, theta, indexing='ij')
        np.testing.assert_allclose(grid.values, np.exp(-(t ** 2 + v ** 2) / 4) / (2 * np.pi), rtol=1e-12)

    @pytest.mark.parametrize('m,n', [(0, 0), (3, 1), (2, 7), (6, 6), (0, 12)])
    def test_tilde_basis_is_fourier_eigenfunction(self, m, n):
        axis = symmetric_grid(9.0, 1 / 32)
        q, p = np.meshgrid(axis, axis, indexing='ij')
        tilde = tilde_rescale(PhaseSpaceGrid(axis, axis, special_hermite(m, n, q, p)))
        freq = np.linspace(-4, 4, 9)
        theta, varpi = np.meshgrid(freq, freq, indexing='ij')
        expected = (-1j) ** (m + n) * special_hermite(m, n, theta / np.sqrt(2), varpi / np.sqrt(2)) / 2
        np.testing.assert_allclose(fourier_2d(tilde, freq, freq).values, expected, atol=1e-8)


class TestNormComparisons:

    def test_wigner_norm(self):
        n = np.arange(21)
        alpha = np.exp(-np.sqrt(n))
        alpha /= np.linalg.norm(alpha)
        report = wigner_norm_comparison(pure_state_density(alpha), WeightFunction.power(1 / 16, 1),
                                        cbar_grid=(1.0, 2.0))
        assert report.in_class
        assert report.direction == 'wigner'

    def test_wigner_norm_needs_strict_growth(self):
        with pytest.raises(PreconditionError):
            wigner_norm_comparison(pure_state_density(CoefficientSequence.unit(0)),
                                   WeightFunction.power(0.5, 2))

    def test_pure_and_ambiguity_comparisons(self):
        w = WeightFunction.power(1 / 16, 1)
        alpha = CoefficientSequence.unit(0)
        dominates, dominated = pure_norm_comparison(alpha, w, cbar_grid=(1.0, 2.0))
        assert dominates.in_class and dominated.in_class
        assert dominates.direction == 'flat_dominates'
        dominates, dominated = ambiguity_norm_comparison(alpha, w, cbar_grid=(1.0, 2.0))
        assert dominates.in_class and dominated.in_class


def test_threaded_synthesis_matches_serial(random_state):
    rho = pure_state_density(random_state(8))
    axis = np.linspace(-2, 2, 9)
    serial = wigner_of_density(rho, axis, axis)
    threaded = wigner_of_density(rho, axis, axis, threads=3)
    np.testing.assert_allclose(threaded.values, serial.values, rtol=1e-13, atol=1e-16)


def _peak_memory(fn):
    tracemalloc.start()
    try:
        fn()
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


def test_threaded_synthesis_memory_does_not_grow_with_truncation():
    rho = np.full((61, 61), 1e-3)
    axis = symmetric_grid(4.0, 1 / 16)
    serial = _peak_memory(lambda: wigner_of_density(rho, axis, axis))
    threaded = _peak_memory(lambda: wigner_of_density(rho, axis, axis, threads=2))
    assert threaded < 4 * serial
