import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultrawigner import (ArgumentError, CapacityError, CoefficientSequence, DataError, HermiteSeries,
                         SampledFunction, TruncationWarning, analyze, derivative_in_coefficients,
                         fourier_in_coefficients, fourier_numeric, gauss_hermite_rule,
                         hermite_log_values, hermite_operator_in_coefficients,
                         hermite_tail_envelope_check, hermite_values, symmetric_grid, synthesize,
                         uniform_bound_check)


class TestHermiteValues:

    def test_low_orders_closed_form(self):
        x = np.linspace(-4, 4, 41)
        h = hermite_values(2, x)
        g = np.pi ** -0.25 * np.exp(-x ** 2 / 2)
        np.testing.assert_allclose(h[0], g, rtol=1e-14)
        np.testing.assert_allclose(h[1], np.sqrt(2) * x * g, rtol=1e-14, atol=1e-300)
        np.testing.assert_allclose(h[2], (2 * x ** 2 - 1) / np.sqrt(2) * g, rtol=1e-13, atol=1e-16)

    def test_log_values_far_out(self):
        signs, logs = hermite_log_values(0, np.array([40.0]))
        assert signs[0, 0] == 1
        assert logs[0, 0] == pytest.approx(-800 - 0.25 * np.log(np.pi), rel=1e-15)

    def test_high_order_stays_finite(self):
        signs, logs = hermite_log_values(2000, np.array([0.5, 30.0, 80.0]))
        assert np.all(np.isfinite(logs[-1]))
        assert np.all(logs[:, 0] <= 1e-12)

    def test_parity(self):
        x = np.linspace(0.1, 6, 30)
        h_plus, h_minus = hermite_values(9, x), hermite_values(9, -x)
        signs = (-1.0) ** np.arange(10)
        np.testing.assert_allclose(h_minus, signs[:, None] * h_plus, rtol=1e-13, atol=1e-300)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            hermite_values(5000, 0.0)
        with pytest.raises(ArgumentError):
            hermite_values(-1, 0.0)


class TestQuadrature:

    def test_weights_sum(self):
        rule = gauss_hermite_rule(40)
        assert np.sum(rule.weights) == pytest.approx(np.sqrt(np.pi), rel=1e-13)
        np.testing.assert_allclose(rule.nodes, -rule.nodes[::-1], atol=1e-14)

    def test_matches_numpy_for_small_orders(self):
        nodes, weights = np.polynomial.hermite.hermgauss(20)
        rule = gauss_hermite_rule(20)
        np.testing.assert_allclose(rule.nodes, nodes, atol=1e-13)
        np.testing.assert_allclose(rule.weights, weights, rtol=1e-11)

    def test_orthonormality(self):
        rule = gauss_hermite_rule(61)
        h = hermite_values(60, rule.nodes)
        gram = (h * rule.scaled_weights) @ h.T
        np.testing.assert_allclose(gram, np.eye(61), atol=1e-10)

    def test_bad_order(self):
        with pytest.raises(ArgumentError):
            gauss_hermite_rule(0)


class TestCoefficients:

    def test_unit_and_padding(self):
        alpha = CoefficientSequence.unit(2, 5)
        assert alpha.n_max == 5
        assert alpha.padded(8).values[2] == 1
        with pytest.raises(ArgumentError):
            alpha.padded(3)

    def test_rejects_empty_and_nan(self):
        with pytest.raises(ArgumentError):
            CoefficientSequence([])
        with pytest.raises(DataError):
            CoefficientSequence([1.0, np.inf])

    def test_analyze_recovers_basis_function(self):
        rule = gauss_hermite_rule(40)
        alpha = analyze(lambda x: hermite_values(3, x)[3], 10, rule)
        np.testing.assert_allclose(alpha.values, CoefficientSequence.unit(3, 10).values, atol=1e-12)

    def test_analyze_synthesize_roundtrip(self, random_state):
        alpha = random_state(15)
        rule = gauss_hermite_rule(32)
        back = analyze(HermiteSeries(alpha), 15, rule)
        np.testing.assert_allclose(back.values, alpha.values, atol=1e-12)

    def test_analyze_needs_enough_nodes(self):
        with pytest.raises(ArgumentError):
            analyze(np.exp, 10, gauss_hermite_rule(5))

    def test_analyze_reports_bad_samples(self):
        with pytest.raises(DataError, match='not finite'):
            analyze(lambda x: 1.0 / x, 2, gauss_hermite_rule(5))

    def test_fourier_in_coefficients(self):
        alpha = CoefficientSequence(np.ones(5))
        np.testing.assert_allclose(fourier_in_coefficients(alpha).values, [1, -1j, -1, 1j, 1])

    @pytest.mark.parametrize('n', range(9))
    def test_fourier_numeric_eigenfunctions(self, n):
        x = symmetric_grid(20, 1 / 16)
        xi = np.linspace(-5, 5, 21)
        samples = SampledFunction(x, hermite_values(n, x)[n])
        out = fourier_numeric(samples, xi)
        np.testing.assert_allclose(out.values, (-1j) ** n * hermite_values(n, xi)[n], atol=1e-8)
        assert out.warnings == ()

    def test_fourier_numeric_warns_on_truncation(self):
        x = symmetric_grid(2, 1 / 16)
        samples = SampledFunction(x, np.exp(-x ** 2 / 2))
        with pytest.warns(TruncationWarning):
            out = fourier_numeric(samples, [0.0])
        assert len(out.warnings) == 1

    def test_fourier_numeric_needs_symmetric_grid(self):
        x = np.linspace(0, 4, 33)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            with pytest.raises(ArgumentError):
                fourier_numeric(SampledFunction(x, np.exp(-x ** 2)), [0.0])

    def test_operator_power(self):
        alpha = CoefficientSequence(np.ones(6))
        out = hermite_operator_in_coefficients(alpha, 2)
        np.testing.assert_allclose(out.values, (2 * np.arange(6) + 1.0) ** 2)

    def test_derivative_identities(self):
        d0 = derivative_in_coefficients(CoefficientSequence.unit(0, 1))
        np.testing.assert_allclose(d0.values[:3], [0, -1 / np.sqrt(2), 0], atol=1e-15)
        d1 = derivative_in_coefficients(CoefficientSequence.unit(1, 1))
        np.testing.assert_allclose(d1.values[:3], [1 / np.sqrt(2), 0, -1], atol=1e-15)

    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=12))
    @settings(max_examples=50, deadline=None)
    def test_derivative_matches_finite_difference(self, coeffs):
        alpha = CoefficientSequence(coeffs)
        x = np.linspace(-3, 3, 13)
        eps = 1e-6
        numeric = (synthesize(alpha, x + eps) - synthesize(alpha, x - eps)) / (2 * eps)
        exact = synthesize(derivative_in_coefficients(alpha), x)
        np.testing.assert_allclose(exact, numeric, atol=1e-6)


class TestBounds:

    @pytest.mark.parametrize('n', [0, 1, 5, 20, 100])
    def test_tail_envelope_holds(self, n):
        s = np.sqrt(2 * n + 1)
        report = hermite_tail_envelope_check(n, np.linspace(s, s + 10, 401))
        assert report.holds
        assert report.violations.size == 0

    def test_small_envelope_scale_fails(self):
        report = hermite_tail_envelope_check(0, np.linspace(1, 6, 51), envelope_scale=0.1)
        assert not report.holds
        assert report.violations[0] == pytest.approx(1.0)

    def test_tail_envelope_needs_tail_points(self):
        with pytest.raises(ArgumentError):
            hermite_tail_envelope_check(10, np.linspace(-2, 2, 5))

    def test_uniform_bound(self):
        report = uniform_bound_check(100, np.linspace(-16, 16, 3201))
        assert report.holds
        assert report.max_abs == pytest.approx(np.pi ** -0.25, rel=1e-12)
        assert report.max_scaled < 1.0
