'''Hermite functions, Gauss-Hermite quadrature and coefficient maps.

The normalized Hermite functions h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))
form the Fock basis of L^2(R). Everything here works with the normalized
three-term recurrence

    h_{n+1}(x) = sqrt(2/(n+1)) x h_n(x) - sqrt(n/(n+1)) h_{n-1}(x),

run on mantissas with a separate log scale per point, so neither the
Gaussian seed nor the polynomial growth can under- or overflow.
'''
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import logsumexp

from .errors import (ArgumentError, CapacityError, DataError, NumericError,
                     TruncationWarning)
from .utils import SampledFunction, check_finite, is_uniform_symmetric, log_abs


logger = logging.getLogger(__name__)

HERMITE_CAPACITY = 4096
FOURIER_DECAY = 1e-14
_RESCALE_ABOVE = 1e150
_LOG_MAX_FLOAT = np.log(np.finfo(float).max)
_QUARTER_TURNS = np.array([1, -1j, -1, 1j])


def _check_capacity(n_max, capacity):
    if n_max < 0:
        raise ArgumentError(f'n_max must be nonnegative, got {n_max}')
    if n_max > capacity:
        raise CapacityError(f'n_max={n_max} exceeds the Hermite capacity of {capacity}')


def hermite_log_values(n_max, x, capacity=HERMITE_CAPACITY):
    '''Returns (sign, log|h_n(x)|) for n = 0..n_max, each of shape (n_max+1,) + x.shape.'''
    _check_capacity(n_max, capacity)
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    signs = np.empty((n_max + 1, x.size))
    logs = np.empty((n_max + 1, x.size))
    log_scale = -0.5 * x ** 2 - 0.25 * np.log(np.pi)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for n in range(n_max + 1):
        if n > 0:
            nxt = np.sqrt(2.0 / n) * x * cur - np.sqrt((n - 1.0) / n) * prev
            prev, cur = cur, nxt
        signs[n] = np.sign(cur)
        logs[n] = log_abs(cur) + log_scale
        big = np.abs(cur) > _RESCALE_ABOVE
        if np.any(big):
            scale = np.where(big, np.abs(cur), 1.0)
            cur = cur / scale
            prev = prev / scale
            log_scale = log_scale + np.log(scale)
    return signs.reshape((n_max + 1,) + shape), logs.reshape((n_max + 1,) + shape)


def hermite_values(n_max, x, capacity=HERMITE_CAPACITY):
    '''Values h_0(x)..h_{n_max}(x), stacked along the first axis.'''
    signs, logs = hermite_log_values(n_max, x, capacity=capacity)
    return signs * np.exp(logs)


@dataclass(frozen=True)
class QuadratureRule:
    '''Gauss-Hermite rule for the weight e^{-x^2}.

    `scaled_weights` are w_k e^{x_k^2}; they are applied to integrands that
    already carry the Gaussian, such as f h_n.
    '''
    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: np.ndarray

    def __post_init__(self):
        for name in ('nodes', 'weights', 'scaled_weights'):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def order(self):
        return len(self.nodes)


def gauss_hermite_rule(order, capacity=HERMITE_CAPACITY):
    if order < 1:
        raise ArgumentError(f'Quadrature order must be at least 1, got {order}')
    _check_capacity(order, capacity)
    if order == 1:
        nodes = np.zeros(1)
    else:
        off_diagonal = np.sqrt(np.arange(1, order) / 2.0)
        try:
            nodes = eigh_tridiagonal(np.zeros(order), off_diagonal, eigvals_only=True)
        except LinAlgError as err:
            raise NumericError(f'Tridiagonal eigen-solver failed for order {order}',
                               diagnostics={'order': order, 'cause': str(err)}) from err
        # One Newton step on p_N, using p_N' = sqrt(2N) p_{N-1}.
        signs, logs = hermite_log_values(order, nodes, capacity=capacity)
        ratio = signs[order] * signs[order - 1] * np.exp(logs[order] - logs[order - 1])
        nodes = nodes - ratio / np.sqrt(2.0 * order)
        nodes = 0.5 * (nodes - nodes[::-1])
    _, logs = hermite_log_values(order - 1, nodes, capacity=capacity)
    # Christoffel numbers: w_k e^{x_k^2} = 1 / sum_{j<N} h_j(x_k)^2.
    scaled = np.exp(-logsumexp(2.0 * logs, axis=0))
    weights = scaled * np.exp(-nodes ** 2)
    logger.debug('Gauss-Hermite rule of order %d, max node %.6g', order, nodes[-1])
    return QuadratureRule(nodes=nodes, weights=weights, scaled_weights=scaled)


@dataclass(frozen=True)
class CoefficientSequence:
    '''Hermite coefficients alpha_n = <f, h_n>, n = 0..n_max.'''
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).ravel()
        if values.size == 0:
            raise ArgumentError('A coefficient sequence needs at least one entry')
        check_finite(values, 'Hermite coefficients')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def n_max(self):
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    @classmethod
    def unit(cls, n, n_max=None):
        values = np.zeros((n if n_max is None else n_max) + 1, dtype=complex)
        values[n] = 1.0
        return cls(values)

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def padded(self, n_max):
        if n_max < self.n_max:
            raise ArgumentError(f'Cannot pad a sequence of order {self.n_max} down to {n_max}')
        values = np.zeros(n_max + 1, dtype=complex)
        values[:len(self.values)] = self.values
        return CoefficientSequence(values)


class HermiteSeries:
    '''The function f = sum_n alpha_n h_n, evaluable anywhere.'''

    def __init__(self, alpha):
        if not isinstance(alpha, CoefficientSequence):
            alpha = CoefficientSequence(alpha)
        self.alpha = alpha

    def __call__(self, x):
        return synthesize(self.alpha, x)

    def fourier(self):
        return HermiteSeries(fourier_in_coefficients(self.alpha))

    def l2_norm(self):
        return self.alpha.l2_norm()


def analyze(f, n_max, rule):
    if rule.order < n_max + 1:
        raise ArgumentError(f'Quadrature order {rule.order} is too small for n_max={n_max}')
    values = np.asarray(f(rule.nodes), dtype=complex)
    if values.ndim == 0:
        values = np.full(rule.nodes.shape, values)
    if values.shape != rule.nodes.shape:
        raise DataError(f'f returned shape {values.shape} at {rule.order} nodes')
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = rule.nodes[np.flatnonzero(bad)[0]]
        raise DataError(f'f is not finite at quadrature node x={node:.17g}')
    basis = hermite_values(n_max, rule.nodes)
    return CoefficientSequence(basis @ (rule.scaled_weights * values))


def synthesize(alpha, xs):
    xs = np.asarray(xs, dtype=float)
    basis = hermite_values(alpha.n_max, xs)
    return np.tensordot(alpha.values, basis, axes=(0, 0))


def fourier_in_coefficients(alpha):
    '''F h_n = (-i)^n h_n, applied exactly.'''
    turns = _QUARTER_TURNS[np.arange(len(alpha.values)) % 4]
    return CoefficientSequence(alpha.values * turns)


def fourier_numeric(f_samples, xi_grid, chunk=256):
    '''Trapezoid approximation of (2 pi)^{-1/2} int f(x) e^{-i xi x} dx.'''
    x = f_samples.x
    if not is_uniform_symmetric(x):
        raise ArgumentError('fourier_numeric needs a uniform grid symmetric about 0')
    values = check_finite(f_samples.values, 'Function samples')
    xi = np.asarray(xi_grid, dtype=float).ravel()
    notes = []
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > FOURIER_DECAY:
        msg = f'Samples have not decayed at the grid ends (|f| = {edge:.3g} at |x| = {x[-1]:.6g})'
        warnings.warn(msg, TruncationWarning)
        notes.append(msg)
    step = x[1] - x[0]
    weighted = step * values.copy()
    weighted[0] *= 0.5
    weighted[-1] *= 0.5
    out = np.empty(xi.size, dtype=complex)
    for start in range(0, xi.size, chunk):
        block = xi[start:start + chunk]
        out[start:start + chunk] = np.exp(-1j * np.outer(block, x)) @ weighted
    return SampledFunction(xi, out / np.sqrt(2.0 * np.pi), warnings=tuple(notes))


def hermite_operator_in_coefficients(alpha, power):
    '''Coefficients of (x^2 - d^2/dx^2)^M f, i.e. (2n+1)^M alpha_n.'''
    if power < 0:
        raise ArgumentError(f'Power must be nonnegative, got {power}')
    if power == 0:
        return CoefficientSequence(alpha.values.copy())
    log_factor = power * np.log(2.0 * np.arange(len(alpha.values)) + 1.0)
    log_mag = log_factor + log_abs(alpha.values)
    over = np.flatnonzero(log_mag > _LOG_MAX_FLOAT)
    if over.size:
        raise NumericError(f'(2n+1)^{power} alpha_n overflows double range from n={over[0]}',
                           diagnostics={'index': int(over[0]), 'log_magnitude': float(log_mag[over[0]])})
    if log_factor[-1] < _LOG_MAX_FLOAT:
        factors = (2.0 * np.arange(len(alpha.values)) + 1.0) ** power
        return CoefficientSequence(alpha.values * factors)
    phase = np.divide(alpha.values, np.abs(alpha.values),
                      out=np.zeros_like(alpha.values), where=alpha.values != 0)
    return CoefficientSequence(np.exp(np.where(alpha.values != 0, log_mag, 0.0)) * phase)


def derivative_in_coefficients(alpha):
    '''Coefficients of f' (one order longer than alpha).'''
    a = np.concatenate([alpha.values, [0.0, 0.0]])
    k = np.arange(len(alpha.values) + 1)
    out = np.sqrt((k + 1) / 2.0) * a[k + 1]
    out[1:] -= np.sqrt(k[1:] / 2.0) * a[k[1:] - 1]
    return CoefficientSequence(out)


@dataclass(frozen=True)
class TailEnvelopeReport:
    n: int
    holds: bool
    checked_points: int
    max_slack: float
    min_log_margin: float
    violations: np.ndarray = field(repr=False)
    sharp_holds: bool = True

    def to_dict(self):
        return {'n': self.n, 'holds': self.holds, 'checked_points': self.checked_points,
                'max_slack': self.max_slack, 'min_log_margin': self.min_log_margin,
                'violations': [float(v) for v in self.violations[:16]],
                'sharp_holds': self.sharp_holds}


def hermite_tail_envelope_check(n, xs, envelope_scale=1.0, rtol=1e-12):
    '''Checks |h_n(x)| <= e^{-(|x|-s)^2/2} for |x| >= s = sqrt(2n+1).'''
    if envelope_scale <= 0:
        raise ArgumentError(f'envelope_scale must be positive, got {envelope_scale}')
    xs = np.asarray(xs, dtype=float).ravel()
    s = np.sqrt(2.0 * n + 1.0)
    x = xs[np.abs(xs) >= s]
    if x.size == 0:
        raise ArgumentError(f'Grid does not reach |x| >= {s:.6g} for n={n}')
    _, logs = hermite_log_values(n, np.append(x, s))
    log_h, log_hs = logs[n, :-1], logs[n, -1]
    gap = 0.5 * (np.abs(x) - s) ** 2
    log_env = np.log(envelope_scale) - gap
    with np.errstate(invalid='ignore'):
        margin = log_env - log_h
    ok = margin >= -rtol
    sharp = bool(np.all(log_h <= log_hs - gap + rtol))
    return TailEnvelopeReport(
        n=int(n),
        holds=bool(np.all(ok)),
        checked_points=int(x.size),
        max_slack=float(np.max(np.exp(log_env) - np.exp(log_h))),
        min_log_margin=float(np.min(margin)),
        violations=x[~ok],
        sharp_holds=sharp)


@dataclass(frozen=True)
class UniformBoundReport:
    n_max: int
    holds: bool
    max_abs: float
    max_scaled: float
    argmax_scaled: int

    def to_dict(self):
        return {'n_max': self.n_max, 'holds': self.holds, 'max_abs': self.max_abs,
                'max_n_1_12_ratio': self.max_scaled, 'argmax_n': self.argmax_scaled}


def uniform_bound_check(n_max, xs, rtol=1e-12):
    '''|h_n(x)| <= 1 on xs; also records max_n n^{1/12} sup_x |h_n(x)|.'''
    _, logs = hermite_log_values(n_max, np.asarray(xs, dtype=float).ravel())
    sup_log = np.max(logs, axis=1)
    n = np.arange(1, n_max + 1)
    scaled = sup_log[1:] + np.log(n) / 12.0 if n_max > 0 else np.array([-np.inf])
    best = int(np.argmax(scaled))
    return UniformBoundReport(
        n_max=int(n_max),
        holds=bool(np.all(sup_log <= rtol)),
        max_abs=float(np.exp(np.max(sup_log))),
        max_scaled=float(np.exp(scaled[best])),
        argmax_scaled=best + 1)
