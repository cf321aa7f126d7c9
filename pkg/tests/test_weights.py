import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultrawigner import (ArgumentError, DataError, DomainError, ExtrapolationError, NumericError,
                         SampledFunction, WeightFunction, check_weight_axioms, eval_omega,
                         function_norm, matrix_norm, omega_star, phase_space_norm, pure_state_density,
                         sequence_norm, symmetric_grid, hermite_values)
from ultrawigner.phase_space import PhaseSpaceGrid


class TestWeightFunction:

    def test_power_values(self):
        w = WeightFunction.power(1.5, 2)
        assert w(2.0) == pytest.approx(6.0)
        np.testing.assert_allclose(w(np.array([0.0, 1.0, 3.0])), [0.0, 1.5, 13.5])

    def test_scalar_in_scalar_out(self):
        assert isinstance(eval_omega(WeightFunction.power(1, 1), 2.0), float)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            eval_omega(WeightFunction.power(1, 1), -1.0)

    @pytest.mark.parametrize('lam,beta', [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, 2.5)])
    def test_invalid_power(self, lam, beta):
        with pytest.raises(ArgumentError):
            WeightFunction.power(lam, beta)

    def test_scaled_stays_in_family(self):
        w = WeightFunction.power(0.5, 1).scaled(3)
        assert w.lam == pytest.approx(1.5)
        assert w.beta == 1.0
        with pytest.raises(ArgumentError):
            w.scaled(0)

    def test_tabulated_matches_table(self):
        t = np.linspace(0, 10, 11)
        w = WeightFunction.tabulated(np.column_stack([t, t ** 2]))
        np.testing.assert_allclose(w(t), t ** 2, rtol=1e-14, atol=1e-14)
        # Linear data is reproduced exactly between nodes too.
        lin = WeightFunction.tabulated([[0, 0], [1, 2], [4, 8]])
        assert lin(2.5) == pytest.approx(5.0)

    def test_tabulated_outside_table(self):
        w = WeightFunction.tabulated([[0, 0], [1, 1], [2, 2]])
        with pytest.raises(ExtrapolationError):
            w(3.0)

    def test_tabulated_must_be_monotone(self):
        with pytest.raises(ArgumentError):
            WeightFunction.tabulated([[0, 0], [1, 2], [2, 1]])

    def test_json_roundtrip(self):
        for w in (WeightFunction.power(0.25, 1.5), WeightFunction.tabulated([[0, 0], [1, 1], [2, 3]], lam=2)):
            assert WeightFunction.from_json(w.to_json()) == w

    @pytest.mark.parametrize('obj', [{}, {'family': 'power', 'lambda': 1}, {'family': 'spline'}, [1, 2]])
    def test_bad_json(self, obj):
        with pytest.raises(DataError):
            WeightFunction.from_json(obj)

    def test_Omega_is_omega_of_exp(self):
        w = WeightFunction.power(2, 1)
        assert w.Omega(np.log(3.0)) == pytest.approx(6.0)


class TestAxioms:

    def test_subcritical_power_passes_everything(self):
        report = check_weight_axioms(WeightFunction.power(1, 1))
        assert [v.verdict for v in report.verdicts] == ['pass'] * 5

    def test_critical_gaussian_weight(self):
        report = check_weight_axioms(WeightFunction.power(0.5, 2))
        assert report['iv'].verdict == 'pass'
        assert report['v'].verdict == 'fail'

    def test_supercritical_gaussian_weight(self):
        report = check_weight_axioms(WeightFunction.power(1, 2))
        assert report['iv'].verdict == 'fail'
        assert report['iv'].witness is not None

    def test_bounded_weight_fails_log_growth(self):
        w = WeightFunction.tabulated([[0, 1], [1e4, 1]])
        report = check_weight_axioms(w)
        assert report['ii'].verdict == 'fail'
        assert report['i'].verdict == 'pass'

    def test_report_serializes(self):
        out = check_weight_axioms(WeightFunction.power(1, 1)).to_dict()
        assert set(out) == {'i', 'ii', 'iii', 'iv', 'v'}
        assert out['iv']['label'] == 'limsup omega(t) / t^2 <= 1/2'

    def test_grid_must_span(self):
        with pytest.raises(ArgumentError):
            check_weight_axioms(WeightFunction.power(1, 1), grid=np.linspace(1, 10, 50))


class TestOmegaStar:

    def test_closed_form(self):
        w = WeightFunction.power(1, 1)
        assert omega_star(w, np.e) == pytest.approx(0.0, abs=1e-14)
        value, info = omega_star(w, 2.0, full_output=True)
        assert value == pytest.approx(2 * np.log(2) - 2)
        assert info['method'] == 'closed_form'
        assert info['argmax'] == pytest.approx(np.log(2))

    def test_tabulated_search_agrees(self):
        t = np.logspace(-3, 3, 2001)
        w = WeightFunction.tabulated(np.column_stack([t, t]))
        value, info = omega_star(w, 2.0, full_output=True)
        assert info['method'] == 'bounded_search'
        assert value == pytest.approx(2 * np.log(2) - 2, abs=1e-8)

    def test_zero_below_table(self):
        w = WeightFunction.tabulated([[1, 1], [10, 10], [100, 100]])
        with pytest.raises(NumericError):
            omega_star(w, 0.0)

    def test_negative_nu(self):
        with pytest.raises(DomainError):
            omega_star(WeightFunction.power(1, 1), -1.0)

    @given(lam=st.floats(0.1, 2.0), beta=st.floats(0.5, 2.0), nu=st.floats(0.01, 50.0),
           t=st.floats(-5.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_young_inequality(self, lam, beta, nu, t):
        w = WeightFunction.power(lam, beta)
        star = omega_star(w, nu)
        assert nu * t <= float(w.Omega(t)) + star + 1e-9 * (1 + abs(star) + abs(nu * t))

    @given(a=st.floats(0.0, 40.0), b=st.floats(0.0, 40.0), lam=st.floats(0.1, 2.0), beta=st.floats(0.5, 2.0))
    @settings(max_examples=200, deadline=None)
    def test_superadditive(self, a, b, lam, beta):
        w = WeightFunction.power(lam, beta)
        total = omega_star(w, a + b)
        parts = omega_star(w, a) + omega_star(w, b) - omega_star(w, 0.0)
        assert total >= parts - 1e-9 * (1 + abs(total) + abs(parts))

    @given(nu=st.floats(0.01, 40.0), step=st.floats(0.01, 5.0))
    @settings(max_examples=100, deadline=None)
    def test_convex_along_lines(self, nu, step):
        w = WeightFunction.power(0.7, 1.3)
        left, mid, right = (omega_star(w, v) for v in (nu, nu + step, nu + 2 * step))
        assert mid <= 0.5 * (left + right) + 1e-9 * (1 + abs(mid))


class TestNorms:

    def test_sequence_norm_attained_inside(self):
        alpha = np.exp(-np.arange(40.0))
        assert sequence_norm(alpha, WeightFunction.power(0.5, 2)) == pytest.approx(1.0)
        value, info = sequence_norm(alpha, WeightFunction.power(0.5, 2), full_output=True)
        assert info['witness_n'] == 0
        assert not info['divergent']

    def test_sequence_norm_flags_growth(self):
        alpha = np.exp(-np.arange(40.0))
        assert sequence_norm(alpha, WeightFunction.power(2, 2)) == np.inf
        value, info = sequence_norm(alpha, WeightFunction.power(2, 2), flag_divergence=False, full_output=True)
        assert np.isfinite(value)
        assert info['witness_n'] == 39

    def test_sequence_norm_rejects_nan(self):
        with pytest.raises(DataError):
            sequence_norm([1.0, np.nan], WeightFunction.power(1, 1))

    def test_matrix_norm_of_pure_state(self, rng):
        n = np.arange(40)
        alpha = (rng.normal(size=40) + 1j * rng.normal(size=40)) * np.exp(-0.3 * n)
        w = WeightFunction.power(0.1, 1)
        rho = pure_state_density(alpha)
        assert matrix_norm(rho, w) == pytest.approx(sequence_norm(alpha, w) ** 2, rel=1e-12)

    @given(scale=st.floats(1e-3, 1e3))
    @settings(max_examples=50, deadline=None)
    def test_sequence_norm_homogeneous(self, scale):
        alpha = np.exp(-0.5 * np.arange(30.0)) * np.cos(np.arange(30.0))
        w = WeightFunction.power(0.3, 1)
        assert sequence_norm(scale * alpha, w) == pytest.approx(scale * sequence_norm(alpha, w), rel=1e-12)

    @given(shift=st.integers(0, 10))
    @settings(max_examples=20, deadline=None)
    def test_sequence_norm_triangle(self, shift):
        n = np.arange(30.0)
        a = np.exp(-n)
        b = np.roll(np.exp(-0.7 * n), shift) * (n >= shift)
        w = WeightFunction.power(0.4, 1)
        assert sequence_norm(a + b, w) <= sequence_norm(a, w) + sequence_norm(b, w) + 1e-12

    def test_phase_space_norm_of_ground_state(self):
        axis = np.linspace(-4, 4, 81)
        q, p = np.meshgrid(axis, axis, indexing='ij')
        grid = PhaseSpaceGrid(axis, axis, np.exp(-q ** 2 - p ** 2) / np.pi)
        value, info = phase_space_norm(grid, WeightFunction.power(0.5, 1), full_output=True)
        assert value == pytest.approx(np.exp(0.5) / np.pi, rel=1e-12)
        assert np.abs(info['witness_qp']) == pytest.approx([0.5, 0.5])
        assert phase_space_norm(grid, WeightFunction.power(2, 2)) == np.inf

    def test_function_norm_of_ground_state(self):
        x = symmetric_grid(12, 1 / 64)
        h0 = SampledFunction(x, hermite_values(0, x)[0])
        assert function_norm(h0, h0, WeightFunction.power(0.4, 2)) == pytest.approx(2 * np.pi ** -0.25, rel=1e-12)

    def test_function_norm_diverges_past_gaussian(self):
        x = symmetric_grid(12, 1 / 64)
        h0 = SampledFunction(x, hermite_values(0, x)[0])
        assert function_norm(h0, h0, WeightFunction.power(0.6, 2)) == np.inf


def _sample_pair(rng, x):
    envelope = np.exp(-x ** 2 / 4)
    f = SampledFunction(x, (rng.normal(size=x.size) + 1j * rng.normal(size=x.size)) * envelope)
    ff = SampledFunction(x, (rng.normal(size=x.size) + 1j * rng.normal(size=x.size)) * envelope)
    return f, ff


def _scaled_pair(pair, c):
    return tuple(SampledFunction(s.x, c * s.values) for s in pair)


def _summed_pair(left, right):
    return tuple(SampledFunction(a.x, a.values + b.values) for a, b in zip(left, right))


class TestNormAxioms:

    w = WeightFunction.power(0.3, 1)

    def function_norm(self, pair):
        return function_norm(*pair, self.w, flag_divergence=False)

    def matrix_norm(self, rho):
        return matrix_norm(rho, self.w, flag_divergence=False)

    def phase_space_norm(self, axis, values):
        return phase_space_norm(PhaseSpaceGrid(axis, axis, values), self.w, flag_divergence=False)

    def test_function_norm(self, rng):
        x = symmetric_grid(8, 1 / 16)
        f, g = _sample_pair(rng, x), _sample_pair(rng, x)
        assert self.function_norm(_scaled_pair(f, -2.5j)) == pytest.approx(2.5 * self.function_norm(f), rel=1e-12)
        bound = self.function_norm(f) + self.function_norm(g)
        assert self.function_norm(_summed_pair(f, g)) <= bound * (1 + 1e-12)

    def test_matrix_norm(self, rng):
        a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        b = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        assert self.matrix_norm(0.1 * a) == pytest.approx(0.1 * self.matrix_norm(a), rel=1e-12)
        assert self.matrix_norm(a + b) <= (self.matrix_norm(a) + self.matrix_norm(b)) * (1 + 1e-12)

    def test_phase_space_norm(self, rng):
        axis = symmetric_grid(4, 1 / 8)
        envelope = np.exp(-np.add.outer(axis ** 2, axis ** 2))
        a = rng.normal(size=envelope.shape) * envelope
        b = rng.normal(size=envelope.shape) * envelope
        assert self.phase_space_norm(axis, 3j * a) == pytest.approx(3 * self.phase_space_norm(axis, a), rel=1e-12)
        bound = self.phase_space_norm(axis, a) + self.phase_space_norm(axis, b)
        assert self.phase_space_norm(axis, a + b) <= bound * (1 + 1e-12)

    @given(lam=st.floats(0.01, 1.0), factor=st.floats(1.0, 4.0))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_lambda(self, lam, factor):
        x = symmetric_grid(8, 1 / 16)
        f = SampledFunction(x, np.exp(-x ** 2 / 2) * np.cos(3 * x))
        ff = SampledFunction(x, np.exp(-x ** 2 / 2) * np.sinh(0.5 * x))
        small = function_norm(f, ff, WeightFunction.power(lam, 1.5), flag_divergence=False)
        large = function_norm(f, ff, WeightFunction.power(lam * factor, 1.5), flag_divergence=False)
        assert small <= large * (1 + 1e-12)

    def test_polynomially_decaying_density_is_not_in_class(self):
        rho = pure_state_density(1.0 / np.arange(1, 258) ** 2)
        w = WeightFunction.power(1, 1)
        for cbar in (1, 1.5, 2, 3, 4, 6, 8):
            assert matrix_norm(rho, w.scaled(cbar)) == np.inf
