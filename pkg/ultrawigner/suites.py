'''Named verification suites run by `run.py verify`.'''
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from natsort import natsorted

from .decay import (CBAR_GRID, default_extent, fit_envelope, moment_bound_check, tail_sum_check,
                    verify_backward_bound, verify_forward_bound)
from .errors import ArgumentError, UltraWignerError
from .hermite import (CoefficientSequence, HermiteSeries, analyze, fourier_numeric, gauss_hermite_rule,
                      hermite_tail_envelope_check, hermite_values, uniform_bound_check)
from .phase_space import (TILDE, PhaseSpaceGrid, ambiguity_of_coefficients, fourier_2d, isometry_ratio,
                          krasikov_check, marginals, radial_bound_check, special_hermite,
                          special_hermite_integral_matrix, special_hermite_matrix, wigner_of_density)
from .states import (counterexample_density, decay_vs_wigner_experiment, pure_state_density,
                     validate_density)
from .utils import SampledFunction, format_duration, json_float, symmetric_grid
from .weights import WeightFunction, check_weight_axioms


logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    'orthonormality': 1e-10,
    'fourier': 1e-8,
    'oracle': 1e-8,
    'marginals': 1e-6,
    'isometry': 1e-6,
    'ambiguity': 1e-6,
    'slope': 0.05,
    'roundtrip': 0.05,
    'fit_residual': 1e-2,
    'hermitian': 1e-12,
    'psd': 1e-10,
    'trace': 1e-8,
}
DEFAULT_SEED = 1234
ORTHONORMALITY_MAX = 60
FOURIER_MAX = 64
ORACLE_MAX = 20
ORACLE_POINTS = 100
ORACLE_BOX = 4.0
ORACLE_BATCH = 10
RADIAL_MAX = 100
KRASIKOV_MAX = 200
KRASIKOV_ALPHA_MAX = 50
WIGNER_STATE_N = 16
WIGNER_STATES = 10
AMBIGUITY_STATE_N = 6
AMBIGUITY_STATES = 5
EIGEN_MAX_SUM = 12
TAME_N = 128
TAME_GRID = tuple((lam, beta) for lam in (0.5, 1.0, 2.0) for beta in (0.5, 1.0, 1.5))
TAME_CBAR_LIMIT = 8.0
ROUNDTRIP_N = 1024
COUNTEREXAMPLE_MIN_N = 64


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: str
    constants: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == 'pass'

    def to_dict(self):
        return {'name': self.name, 'verdict': self.verdict, 'constants': self.constants,
                'witnesses': self.witnesses}


@dataclass(frozen=True)
class SuiteContext:
    n_max: int = 200
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = DEFAULT_SEED
    perturb: float = 1.0
    threads: int = 1
    weight: WeightFunction = field(default_factory=lambda: WeightFunction.power(1.0 / 16, 1.0))
    cbar_grid: tuple = CBAR_GRID

    def tol(self, name):
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def random_state(self, n_max, salt=0):
        rng = np.random.default_rng(self.seed + salt)
        alpha = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
        return CoefficientSequence(alpha / np.linalg.norm(alpha))


def _verdict(ok):
    return 'pass' if ok else 'fail'


def _stretched_sequence(n_max, lam=1.0, beta=1.0):
    return CoefficientSequence(np.exp(-lam * np.arange(n_max + 1) ** (beta / 2.0)))


# hermite

def check_orthonormality(ctx):
    n = min(ctx.n_max, ORTHONORMALITY_MAX)
    rule = gauss_hermite_rule(n + 1)
    basis = hermite_values(n, rule.nodes)
    gram = (basis * rule.scaled_weights) @ basis.T
    err = float(np.max(np.abs(gram - np.eye(n + 1))))
    m, k = np.unravel_index(int(np.argmax(np.abs(gram - np.eye(n + 1)))), gram.shape)
    return err <= ctx.tol('orthonormality'), {'max_error': err, 'n_max': n}, {'worst_pair': [int(m), int(k)]}


def check_fourier_eigen(ctx):
    n = min(ctx.n_max, FOURIER_MAX)
    x = symmetric_grid(20.0, 1.0 / 16)
    basis = hermite_values(n, x)
    errors = np.empty(n + 1)
    for k in range(n + 1):
        numeric = fourier_numeric(SampledFunction(x, basis[k]), x)
        errors[k] = np.max(np.abs(numeric.values - (-1j) ** k * basis[k]))
    worst = int(np.argmax(errors))
    return errors[worst] <= ctx.tol('fourier'), {'max_error': float(errors[worst])}, {'worst_n': worst}


def _envelope_grid(n_max):
    return symmetric_grid(np.sqrt(2.0 * n_max + 1.0) + 10.0, 1.0 / 64)


def check_tail_envelope(ctx):
    x = _envelope_grid(ctx.n_max)
    reports = [hermite_tail_envelope_check(n, x, envelope_scale=ctx.perturb) for n in range(ctx.n_max + 1)]
    failed = [r for r in reports if not r.holds]
    margin = min(r.min_log_margin for r in reports)
    witnesses = {'violating_n': [r.n for r in failed[:16]],
                 'first_violation_x': float(failed[0].violations[0]) if failed else None,
                 'sharp_form_holds': all(r.sharp_holds for r in reports)}
    return not failed, {'min_log_margin': margin, 'envelope_scale': ctx.perturb}, witnesses


def check_uniform_bound(ctx):
    report = uniform_bound_check(ctx.n_max, _envelope_grid(ctx.n_max))
    return report.holds, {'max_abs': report.max_abs, 'max_n_1_12_ratio': report.max_scaled}, \
        {'argmax_n': report.argmax_scaled}


# laguerre

def check_special_hermite_oracle(ctx):
    n_max = min(ctx.n_max, ORACLE_MAX)
    rng = np.random.default_rng(ctx.seed)
    points = rng.uniform(-ORACLE_BOX, ORACLE_BOX, size=(ORACLE_POINTS, 2))
    errors = np.empty(ORACLE_POINTS)
    for start in range(0, ORACLE_POINTS, ORACLE_BATCH):
        q, p = points[start:start + ORACLE_BATCH].T
        closed = np.moveaxis(special_hermite_matrix(n_max, q, p), -1, 0)
        direct = special_hermite_integral_matrix(n_max, q, p)
        errors[start:start + q.size] = np.max(np.abs(closed - direct), axis=(1, 2))
    worst = int(np.argmax(errors))
    return errors[worst] <= ctx.tol('oracle'), \
        {'max_error': float(errors[worst]), 'points': ORACLE_POINTS, 'n_max': n_max}, \
        {'worst_point': points[worst].tolist()}


def check_radial_bound(ctx):
    m_max = min(ctx.n_max, RADIAL_MAX)
    r = np.arange(0.0, np.sqrt(2.0 * m_max + 1.0) + 6.0 + 1.0 / 16, 1.0 / 64)
    report = radial_bound_check(m_max, r, envelope_scale=ctx.perturb)
    return report.verdict == 'pass', {'K': report.K, 'k_limit': report.k_limit}, \
        {'worst_pair': list(report.worst_pair), 'worst_radius': report.worst_radius,
         'violations': [list(v) for v in report.violations[:16]]}


def check_krasikov(ctx):
    report = krasikov_check(min(ctx.n_max, KRASIKOV_MAX), KRASIKOV_ALPHA_MAX)
    constants = {'max_log_ratio': report.max_log_ratio,
                 'printed_form_max_log_ratio': report.printed_max_log_ratio}
    return report.holds, constants, {'worst': list(report.worst)}


# wigner

def check_marginals(ctx):
    axis = symmetric_grid(12.0, 1.0 / 16)
    q_errors, p_errors, residues = [], [], []
    for k in range(WIGNER_STATES):
        alpha = ctx.random_state(WIGNER_STATE_N, salt=k)
        grid = wigner_of_density(pure_state_density(alpha), axis, axis, threads=ctx.threads)
        q_marginal, p_marginal = marginals(grid)
        series = HermiteSeries(alpha)
        q_errors.append(float(np.max(np.abs(q_marginal - np.abs(series(axis)) ** 2))))
        p_errors.append(float(np.max(np.abs(p_marginal - np.abs(series.fourier()(axis)) ** 2))))
        residues.append(grid.imag_residue)
    worst = int(np.argmax(np.maximum(q_errors, p_errors)))
    ok = max(q_errors[worst], p_errors[worst]) <= ctx.tol('marginals')
    constants = {'q_error': max(q_errors), 'p_error': max(p_errors), 'imag_residue': max(residues),
                 'states': WIGNER_STATES}
    return ok, constants, {'seed': ctx.seed, 'worst_state': worst}


def check_isometry(ctx):
    states = [ctx.random_state(WIGNER_STATE_N, salt=WIGNER_STATES + k) for k in range(WIGNER_STATES)]
    ratios = np.array([isometry_ratio(alpha, threads=ctx.threads) for alpha in states])
    scaled = 4.0 * np.pi * ratios
    spread = float((scaled.max() - scaled.min()) / scaled.mean())
    tol = ctx.tol('isometry')
    ok = spread <= tol and abs(scaled.mean() - 1.0) <= tol
    constants = {'ratio': float(ratios.mean()), 'ratio_times_4pi': float(scaled.mean()),
                 'relative_spread': spread, 'states': WIGNER_STATES}
    return ok, constants, {'ratios_times_4pi': scaled.tolist()}


def _basis_fourier_errors(axis, freq):
    '''Sup error of the 2-D Fourier transform of Phi~_{m,n} against (-i)^{m+n} Phi~_{m,n}.'''
    root2 = np.sqrt(2.0)
    q, p = np.meshgrid(axis, axis, indexing='ij')
    theta, varpi = np.meshgrid(freq, freq, indexing='ij')
    errors = {}
    for m in range(EIGEN_MAX_SUM + 1):
        for n in range(EIGEN_MAX_SUM + 1 - m):
            grid = PhaseSpaceGrid(axis, axis, special_hermite(m, n, q / root2, p / root2) / 2.0, TILDE)
            expected = (-1j) ** (m + n) * special_hermite(m, n, theta / root2, varpi / root2) / 2.0
            errors[(m, n)] = float(np.max(np.abs(fourier_2d(grid, freq, freq).values - expected)))
    return errors


def check_ambiguity_fourier(ctx):
    axis = symmetric_grid(12.0, 1.0 / 16)
    freq = symmetric_grid(8.0, 1.0 / 4)
    state_errors, worst_points = [], []
    for k in range(AMBIGUITY_STATES):
        alpha = ctx.random_state(AMBIGUITY_STATE_N, salt=2 * WIGNER_STATES + k)
        grid = wigner_of_density(pure_state_density(alpha), axis, axis, threads=ctx.threads)
        gap = np.abs(fourier_2d(grid, freq, freq).values
                     - ambiguity_of_coefficients(alpha, freq, freq, threads=ctx.threads).values)
        i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        state_errors.append(float(gap[i, j]))
        worst_points.append([float(freq[i]), float(freq[j])])
    basis_errors = _basis_fourier_errors(axis, freq)
    worst_state = int(np.argmax(state_errors))
    worst_pair = max(basis_errors, key=basis_errors.get)
    tol = ctx.tol('ambiguity')
    ok = state_errors[worst_state] <= tol and basis_errors[worst_pair] <= tol
    constants = {'max_error': state_errors[worst_state], 'basis_max_error': basis_errors[worst_pair],
                 'states': AMBIGUITY_STATES, 'basis_max_index_sum': EIGEN_MAX_SUM}
    return ok, constants, {'worst_point': worst_points[worst_state], 'worst_basis_pair': list(worst_pair)}


def check_origin_value(ctx):
    grid = wigner_of_density(pure_state_density(CoefficientSequence.unit(0)), [0.0], [0.0])
    value = complex(grid.values[0, 0])
    err = abs(value - 1.0 / np.pi)
    return err <= 1e-14, {'value': value.real, 'error': err}, {}


# tame

def check_weight_axioms_default(ctx):
    report = check_weight_axioms(ctx.weight)
    failures = [v.key for v in report.failures]
    return not failures, {}, {'weight': ctx.weight.to_json(), 'axioms': report.to_dict()}


def _tame_bounds(bound):
    constants, failed = {}, []
    for lam, beta in TAME_GRID:
        report = bound(_stretched_sequence(TAME_N, lam, beta))
        cbar = report.forward_constant if report.direction == 'forward' else report.backward_constant
        constants[f'lambda={lam:g},beta={beta:g}'] = report.to_dict()
        if not (report.in_class and cbar <= TAME_CBAR_LIMIT):
            failed.append([lam, beta])
    return not failed, constants, {'failed': failed, 'cbar_limit': TAME_CBAR_LIMIT}


def check_forward_bound(ctx):
    return _tame_bounds(lambda alpha: verify_forward_bound(HermiteSeries(alpha), ctx.weight, ctx.cbar_grid,
                                                           n_max=TAME_N))


def check_backward_bound(ctx):
    return _tame_bounds(lambda alpha: verify_backward_bound(alpha, ctx.weight, ctx.cbar_grid))


def check_moments(ctx):
    series = HermiteSeries(_stretched_sequence(TAME_N))
    constants = {}
    ok = True
    for kind in ('position', 'derivative'):
        report = moment_bound_check(series, ctx.weight, 8, kind=kind, extent=default_extent(TAME_N))
        constants[kind] = report.to_dict()
        ok = ok and report.bounded
    return ok, constants, {}


def check_tail_sums(ctx):
    w = WeightFunction.power(1.0, 1.0)
    single = tail_sum_check(w, 2.0, (50.0, 100.0, 200.0))
    double = tail_sum_check(w, 2.0, (50.0, 100.0, 200.0), dimension=2)
    ratios = [r for r in single.integral_ratios if r is not None]
    ok = bool(ratios) and all(0.5 <= r <= 2.0 for r in ratios) and double.holds
    return ok, {'single': single.to_dict(), 'double': double.to_dict()}, {}


def check_envelope_roundtrip(ctx):
    rule = gauss_hermite_rule(ROUNDTRIP_N + 1)
    tol = ctx.tol('roundtrip')
    constants, failed = {}, []
    for lam, beta in TAME_GRID:
        key = f'lambda={lam:g},beta={beta:g}'
        alpha = analyze(HermiteSeries(_stretched_sequence(ROUNDTRIP_N, lam, beta)), ROUNDTRIP_N, rule)
        try:
            envelope = fit_envelope(alpha, max_residual=ctx.tol('fit_residual'))
        except UltraWignerError as err:
            constants[key] = {'error': str(err)}
            failed.append([lam, beta])
            continue
        constants[key] = envelope.to_dict()
        if abs(envelope.beta_hat - beta) > tol or abs(envelope.lambda_hat - lam) > tol:
            failed.append([lam, beta])
    return not failed, constants, {'failed': failed, 'n_max': ROUNDTRIP_N}


# counterexample

def _counterexample_n(ctx):
    return max(ctx.n_max, COUNTEREXAMPLE_MIN_N)


def check_counterexample_findings(ctx):
    n_max = _counterexample_n(ctx)
    report = validate_density(counterexample_density(n_max), hermitian_tol=ctx.tol('hermitian'),
                              psd_tol=ctx.tol('psd'), trace_tol=ctx.tol('trace'))
    trace_limit = 2.0 * np.log(2.0) - 1.0
    ok = (report.psd == 'fail' and abs(report.min_eigenvalue + 1.0 / 6.0) <= 1e-12
          and abs(report.trace - trace_limit) <= 1.0 / ((n_max + 2.0) * (n_max + 3.0)))
    return ok, report.to_dict(), {'trace_limit': trace_limit}


def check_counterexample_experiment(ctx):
    report = decay_vs_wigner_experiment(_counterexample_n(ctx))
    ok = (report.diagonal_fit == 'degenerate' and abs(report.slope + 1.0) <= ctx.tol('slope')
          and report.positive and report.bound_holds and report.series_error <= report.series_tail_bound)
    return ok, report.to_dict(), {}


def check_counterexample_origin(ctx):
    n_max = _counterexample_n(ctx)
    grid = wigner_of_density(counterexample_density(n_max), [0.0], [0.0])
    expected = (1.0 - 1.0 / (n_max + 2.0)) / np.pi
    err = abs(complex(grid.values[0, 0]) - expected)
    return err <= 1e-12, {'value': float(grid.values[0, 0].real), 'error': err}, {'expected': expected}


SUITES = {
    'hermite': [('orthonormality', check_orthonormality),
                ('fourier_eigen', check_fourier_eigen),
                ('tail_envelope', check_tail_envelope),
                ('uniform_bound', check_uniform_bound)],
    'laguerre': [('oracle', check_special_hermite_oracle),
                 ('radial_bound', check_radial_bound),
                 ('krasikov', check_krasikov)],
    'wigner': [('origin', check_origin_value),
               ('marginals', check_marginals),
               ('isometry', check_isometry),
               ('ambiguity_fourier', check_ambiguity_fourier)],
    'tame': [('axioms', check_weight_axioms_default),
             ('forward', check_forward_bound),
             ('backward', check_backward_bound),
             ('moments', check_moments),
             ('tail_sums', check_tail_sums),
             ('envelope_roundtrip', check_envelope_roundtrip)],
    'counterexample': [('findings', check_counterexample_findings),
                       ('experiment', check_counterexample_experiment),
                       ('origin', check_counterexample_origin)],
}


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return json_float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def run_check(name, fn, ctx):
    start = time.time()
    ok, constants, witnesses = fn(ctx)
    result = CheckResult(name, _verdict(ok), _jsonable(constants), _jsonable(witnesses))
    print(f'Check {name}: {result.verdict} ({format_duration(time.time() - start)})')
    return result


def run_suites(names, ctx):
    '''Runs every check of the named suites; results come back in natural name order.'''
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ArgumentError(f'Unknown suite(s): {", ".join(unknown)}')
    checks = [(f'{suite}.{name}', fn) for suite in names for name, fn in SUITES[suite]]
    logger.info('Running %d checks on %d thread(s)', len(checks), ctx.threads)
    if ctx.threads > 1:
        results = Parallel(n_jobs=ctx.threads, prefer='threads')(
            delayed(run_check)(name, fn, ctx) for name, fn in checks)
    else:
        results = [run_check(name, fn, ctx) for name, fn in checks]
    return natsorted(results, key=lambda r: r.name)


def report_dict(command, results):
    verdict = 'fail' if any(r.verdict == 'fail' for r in results) else 'pass'
    return {'command': command, 'verdict': verdict, 'checks': [r.to_dict() for r in results]}
