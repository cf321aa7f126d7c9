'''Decay envelopes of Hermite coefficients and empirical tame bounds.

The constants reported here are the smallest grid values that work on the
given inputs. They are measurements, not proofs.
'''
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (ArgumentError, DataError, ExtrapolationError, FitDegenerateError,
                     InsufficientSupportError, PreconditionError, TruncationWarning)
from .hermite import (CoefficientSequence, HermiteSeries, analyze, fourier_numeric,
                      gauss_hermite_rule)
from .utils import SampledFunction, json_float, log_abs, symmetric_grid
from .weights import (AXIOM_GRID, check_weight_axioms, eval_omega, function_norm,
                      omega_star, sequence_norm)


logger = logging.getLogger(__name__)

CBAR_GRID = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)
ENVELOPE_FLOOR = 1e-12
ENVELOPE_MIN_INDEX = 4
ENVELOPE_MIN_SUPPORT = 8
FIT_MAX_RESIDUAL = 1e-2
BETA_SLACK = 1e-6
FUNCTION_GRID_EXTENT = 12.0
FUNCTION_GRID_STEP = 1.0 / 64
# Analyzed coefficients below this fraction of the largest one are rounding noise.
ROUNDING_FLOOR = 1e-13
TAIL_TERM_FLOOR = 1e-30
TAIL_MAX_TERMS = 1 << 22
MOMENT_QUADRATURE_ORDER = 160


@dataclass(frozen=True)
class DecayEnvelope:
    lambda_hat: float
    beta_hat: float
    c_hat: float
    residual: float
    support_count: int

    def to_dict(self):
        return {'lambda_hat': self.lambda_hat, 'beta_hat': self.beta_hat, 'c_hat': self.c_hat,
                'residual': self.residual, 'support_count': self.support_count}


def fit_envelope(alpha, floor=ENVELOPE_FLOOR, min_index=ENVELOPE_MIN_INDEX,
                 min_support=ENVELOPE_MIN_SUPPORT, max_residual=FIT_MAX_RESIDUAL):
    '''Fits |alpha_n| ~ C e^{-lambda n^{beta/2}} by least squares in
    (log sqrt n, log(-log(|alpha_n| / C))) coordinates with C = max |alpha_n|.'''
    mags = np.abs(np.asarray(getattr(alpha, 'values', alpha)))
    c_hat = float(np.max(mags)) if mags.size else 0.0
    if not c_hat > 0:
        raise InsufficientSupportError('Coefficient sequence is identically zero')
    n = np.arange(mags.size)
    usable = (n >= min_index) & (mags > c_hat * floor)
    if np.count_nonzero(usable) < min_support:
        raise InsufficientSupportError(
            f'Only {np.count_nonzero(usable)} coefficients with n >= {min_index} exceed the floor; need {min_support}')
    keep = usable & (mags < c_hat)
    if np.count_nonzero(keep) < min_support:
        raise FitDegenerateError('Coefficient sequence does not decay below its maximum')
    u = 0.5 * np.log(n[keep])
    y = np.log(-np.log(mags[keep] / c_hat))
    design = np.column_stack([np.ones_like(u), u])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.max(np.abs(design @ coef - y)))
    log_lam, beta = float(coef[0]), float(coef[1])
    if not (np.isfinite(residual) and np.isfinite(beta)):
        raise FitDegenerateError('Envelope fit produced non-finite parameters', residual, beta)
    if residual > max_residual:
        raise FitDegenerateError(
            f'Envelope fit residual {residual:.3g} exceeds {max_residual:.3g}; decay is not of the form e^(-lambda n^(beta/2))',
            residual, beta)
    if beta <= 0 or beta > 2 + BETA_SLACK:
        raise FitDegenerateError(f'Fitted exponent {beta:.6g} lies outside (0, 2]', residual, beta)
    return DecayEnvelope(lambda_hat=float(np.exp(log_lam)), beta_hat=min(beta, 2.0), c_hat=c_hat,
                         residual=residual, support_count=int(np.count_nonzero(keep)))


@dataclass(frozen=True)
class TameBoundReport:
    '''Ratios lhs / rhs(C̄) over a grid of dilations C̄.

    A ratio is finite only when both sides are finite, so a vacuous bound
    (right-hand side infinite) never counts as a pass.
    '''
    direction: str
    cbar_grid: tuple
    lhs: float
    rhs: tuple
    ratios: tuple

    @property
    def finite_scales(self):
        return tuple(c for c, r in zip(self.cbar_grid, self.ratios) if np.isfinite(r))

    @property
    def cbar(self):
        scales = self.finite_scales
        return scales[0] if scales else np.inf

    @property
    def constant(self):
        for c, r in zip(self.cbar_grid, self.ratios):
            if np.isfinite(r):
                return r
        return np.inf

    @property
    def in_class(self):
        return bool(np.isfinite(self.lhs)) and bool(self.finite_scales)

    @property
    def forward_constant(self):
        return self.cbar if self.direction == 'forward' else None

    @property
    def backward_constant(self):
        return self.cbar if self.direction == 'backward' else None

    def to_dict(self):
        return {'direction': self.direction, 'cbar': json_float(self.cbar),
                'constant': json_float(self.constant), 'in_class': self.in_class,
                'lhs': json_float(self.lhs),
                'scales': [{'cbar': c, 'rhs': json_float(r), 'ratio': json_float(q)}
                           for c, r, q in zip(self.cbar_grid, self.rhs, self.ratios)]}


def _ratio(lhs, rhs):
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        return np.inf
    if rhs == 0:
        return 0.0 if lhs == 0 else np.inf
    return lhs / rhs


def _as_function(f):
    if isinstance(f, CoefficientSequence):
        return HermiteSeries(f)
    return f


def _fourier_samples(f, fourier, samples):
    if fourier is None and hasattr(f, 'fourier'):
        fourier = f.fourier()
    if fourier is None:
        return fourier_numeric(samples, samples.x)
    return SampledFunction(samples.x, fourier(samples.x))


def default_extent(n_max):
    return max(FUNCTION_GRID_EXTENT, np.sqrt(2.0 * n_max + 1.0) + 6.0)


def _floored(alpha, floor=ROUNDING_FLOOR):
    values = np.array(alpha.values)
    values[np.abs(values) < floor * np.max(np.abs(values))] = 0.0
    return CoefficientSequence(values)


def verify_forward_bound(f, w, cbar_grid=CBAR_GRID, n_max=64, fourier=None, order=None,
                         extent=None, step=FUNCTION_GRID_STEP):
    '''Ratios ||H(f)||_omega / ||f||_{C̄ omega}.'''
    f = _as_function(f)
    rule = gauss_hermite_rule(order or 2 * (n_max + 1))
    alpha = _floored(analyze(f, n_max, rule))
    lhs = sequence_norm(alpha, w)
    x = symmetric_grid(extent or default_extent(n_max), step)
    samples = SampledFunction(x, f(x))
    fourier_samples = _fourier_samples(f, fourier, samples)
    rhs = tuple(function_norm(samples, fourier_samples, w.scaled(c)) for c in cbar_grid)
    report = TameBoundReport('forward', tuple(cbar_grid), lhs, rhs,
                             tuple(_ratio(lhs, r) for r in rhs))
    if not np.isfinite(lhs):
        logger.info('Forward bound: coefficients not in the weighted class (not-in-class)')
    return report


def verify_backward_bound(alpha, w, cbar_grid=CBAR_GRID, axiom_grid=AXIOM_GRID, extent=None,
                          step=FUNCTION_GRID_STEP):
    '''Ratios ||f||_omega / ||alpha||_{C̄ omega} for f = sum alpha_n h_n.'''
    axioms = check_weight_axioms(w, axiom_grid)
    if not axioms.passed('v'):
        raise PreconditionError(f'Backward bound needs axiom (v); verdict was "{axioms["v"].verdict}"')
    series = HermiteSeries(alpha)
    x = symmetric_grid(extent or default_extent(series.alpha.n_max), step)
    samples = SampledFunction(x, series(x))
    lhs = function_norm(samples, SampledFunction(x, series.fourier()(x)), w)
    rhs = tuple(sequence_norm(series.alpha, w.scaled(c)) for c in cbar_grid)
    return TameBoundReport('backward', tuple(cbar_grid), lhs, rhs,
                           tuple(_ratio(lhs, r) for r in rhs))


@dataclass(frozen=True)
class TailSumReport:
    cbar: float
    dimension: int
    ys: tuple
    tails: tuple
    constants: tuple
    integral_ratios: tuple
    terms_summed: int

    @property
    def constant(self):
        return max(self.constants)

    @property
    def holds(self):
        return bool(np.isfinite(self.constant))

    def to_dict(self):
        return {'cbar': self.cbar, 'dimension': self.dimension, 'constant': json_float(self.constant),
                'holds': self.holds, 'terms_summed': self.terms_summed,
                'points': [{'y': y, 'tail': t, 'constant': json_float(c),
                            'integral_ratio': None if r is None else json_float(r)}
                           for y, t, c, r in zip(self.ys, self.tails, self.constants, self.integral_ratios)]}


def _tail_terms(w, cbar, term_floor, max_terms):
    chunks = []
    start, size = 0, 4096
    log_floor = np.log(term_floor)
    while True:
        n = np.arange(start, start + size)
        try:
            log_terms = -cbar * eval_omega(w, np.sqrt(n))
        except ExtrapolationError:
            raise DataError(f'Tail terms stay above {term_floor:g} up to the end of the weight table '
                            f'(n = {start}); the weight violates axiom (ii) numerically') from None
        chunks.append(log_terms)
        if log_terms[-1] < log_floor:
            break
        start += size
        if start >= max_terms:
            raise DataError(f'Tail terms still exceed {term_floor:g} after {start} terms; '
                            'the weight violates axiom (ii) numerically')
        size = min(2 * size, max_terms - start)
    return np.exp(np.concatenate(chunks))


def tail_sum_check(w, cbar, ys, dimension=1, term_floor=TAIL_TERM_FLOOR, max_terms=TAIL_MAX_TERMS):
    '''Sum_{n >= y} e^{-C̄ omega(sqrt n)} against C e^{-C̄ omega(sqrt y)/2}
    (dimension 2: sum over m + n >= y against C e^{-C̄ omega(sqrt y)/sqrt 2}).'''
    if dimension not in (1, 2):
        raise ArgumentError(f'dimension must be 1 or 2, got {dimension}')
    ys = tuple(float(y) for y in np.atleast_1d(ys))
    if not ys or min(ys) <= 0:
        raise ArgumentError('tail_sum_check needs positive y values')
    terms = _tail_terms(w, cbar, term_floor, max_terms)
    # tails[k] = sum_{n >= k} terms[n]; accumulated from the small end.
    tails = np.append(np.cumsum(terms[::-1])[::-1], 0.0)
    size = terms.size
    shrink = 2.0 if dimension == 1 else np.sqrt(2.0)
    out_tails, constants, ratios = [], [], []
    for y in ys:
        k = min(int(np.ceil(y)), size)
        if dimension == 1:
            tail = tails[k]
        else:
            m = np.arange(size)
            tail = float(np.sum(terms * tails[np.clip(k - m, 0, size)]))
        root = np.sqrt(y)
        exponent = cbar * eval_omega(w, root)
        out_tails.append(float(tail))
        constants.append(float(tail * np.exp(exponent / shrink)))
        ratio = None
        if dimension == 1:
            slope = cbar * float(w.derivative(root)) - 1.0 / root
            if slope > 0:
                ratio = float(tail / (2.0 * root * np.exp(-exponent) / slope))
        ratios.append(ratio)
    logger.debug('Tail sums for cbar=%g summed %d terms', cbar, size)
    return TailSumReport(cbar=float(cbar), dimension=dimension, ys=ys, tails=tuple(out_tails),
                         constants=tuple(constants), integral_ratios=tuple(ratios), terms_summed=size)


@dataclass(frozen=True)
class MomentReport:
    kind: str
    nus: tuple
    moments: tuple
    ratios: tuple
    weighted_norm: float

    @property
    def constant(self):
        return max(self.ratios)

    @property
    def bounded(self):
        return bool(np.all(np.isfinite(self.ratios)))

    def to_dict(self):
        return {'kind': self.kind, 'constant': json_float(self.constant), 'bounded': self.bounded,
                'weighted_norm': self.weighted_norm,
                'moments': [{'nu': v, 'l2': m, 'ratio': json_float(r)}
                            for v, m, r in zip(self.nus, self.moments, self.ratios)]}


def moment_bound_check(f, w, nu_max, kind='position', fourier=None, order=MOMENT_QUADRATURE_ORDER,
                       extent=FUNCTION_GRID_EXTENT, step=FUNCTION_GRID_STEP, rtol=1e-14):
    '''||x^nu f|| (or ||D^nu f|| = ||xi^nu F f||) against e^{Omega*(nu+1)} ||f||_omega.'''
    if kind not in ('position', 'derivative'):
        raise ArgumentError(f'Unknown moment kind "{kind}"')
    f = _as_function(f)
    x = symmetric_grid(extent, step)
    samples = SampledFunction(x, f(x))
    fourier_samples = _fourier_samples(f, fourier, samples)
    norm = function_norm(samples, fourier_samples, w)
    if not np.isfinite(norm) or norm == 0:
        raise PreconditionError(f'||f||_omega must be finite and nonzero on the grid, got {norm}')
    if kind == 'position':
        target = f
    elif fourier is not None:
        target = fourier
    elif hasattr(f, 'fourier'):
        target = f.fourier()
    else:
        raise ArgumentError('The derivative moment needs an evaluable Fourier transform')
    rule = gauss_hermite_rule(order)
    # |x^nu f|^2 is a polynomial of degree 2(nu + N) times e^{-x^2} for a degree-N series,
    # which the rule integrates exactly while 2(nu + N) <= 2 order - 1.
    exact_nu = order - 1 - target.alpha.n_max if isinstance(target, HermiteSeries) else -1
    log_values = log_abs(np.asarray(target(rule.nodes), dtype=complex))
    log_nodes = log_abs(rule.nodes)
    nus, moments, ratios = [], [], []
    for nu in range(nu_max + 1):
        power_term = nu * log_nodes if nu else 0.0
        log_terms = np.log(rule.scaled_weights) + 2.0 * (power_term + log_values)
        total = np.logaddexp.reduce(log_terms)
        if nu > exact_nu and max(log_terms[0], log_terms[-1]) > total + np.log(rtol):
            warnings.warn(f'Moment integrand for nu={nu} has not decayed at the outermost nodes',
                          TruncationWarning)
        moment = float(np.exp(0.5 * total))
        nus.append(nu)
        moments.append(moment)
        ratios.append(float(np.exp(0.5 * total - omega_star(w, nu + 1) - np.log(norm))))
    return MomentReport(kind=kind, nus=tuple(nus), moments=tuple(moments), ratios=tuple(ratios),
                        weighted_norm=float(norm))

