'''Special Hermite functions, Wigner distributions and ambiguity functions.

For m >= n the special Hermite function has the Laguerre form

    Phi_{m,n}(q,p) = (-1)^m / pi * sqrt(n!/m!) * e^{-r^2} * (sqrt(2)(ip - q))^{m-n}
                     * L_n^{m-n}(2 r^2),         r^2 = q^2 + p^2,

and Phi_{n,m}(q,p) = Phi_{m,n}(q,-p), which is also conj(Phi_{m,n}(q,p)).
Magnitudes are carried as logarithms (log-gamma prefactors plus a Laguerre
recurrence rescaled every RESCALE_EVERY steps) and the phase separately.
'''
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.integrate import quad_vec, trapezoid
from scipy.special import gammaln

from .decay import CBAR_GRID, TameBoundReport, _ratio
from .errors import (ArgumentError, CapacityError, ConventionError, DomainError,
                     NumericError, PreconditionError, TruncationWarning)
from .hermite import HermiteSeries, hermite_values
from .utils import SampledFunction, check_finite, log_abs, symmetric_grid
from .weights import (AXIOM_GRID, check_weight_axioms, flat_norm, function_norm,
                      matrix_norm, phase_space_norm)


logger = logging.getLogger(__name__)

PLAIN = 'plain'
TILDE = 'tilde'
LAGUERRE_CAPACITY = 2048
RESCALE_EVERY = 64
_RESCALE_ABOVE = 1e250
ORACLE_MAX_INDEX = 64
PHASE_GRID_EXTENT = 8.0
PHASE_GRID_STEP = 1.0 / 32
AMBIGUITY_GRID_EXTENT = 16.0
AMBIGUITY_GRID_STEP = 1.0 / 16
COMPARISON_GRID_STEP = 1.0 / 16
BOUNDARY_DECAY = 1e-12
KRASIKOV_CONSTANT = 1444.0
RADIAL_K_LIMIT = 1.0
_LOG_PI = np.log(np.pi)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    '''Values on a rectangular (q, p) grid, one row per q.'''
    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    convention: str = PLAIN
    imag_residue: float = 0.0
    warnings: tuple = field(default=())

    def __post_init__(self):
        q = np.array(self.q_axis, dtype=float).ravel()
        p = np.array(self.p_axis, dtype=float).ravel()
        values = np.array(self.values, dtype=complex)
        if np.any(np.diff(q) <= 0) or np.any(np.diff(p) <= 0):
            raise ArgumentError('Phase-space axes must be strictly increasing')
        if values.shape != (q.size, p.size):
            raise ArgumentError(f'Values of shape {values.shape} do not match axes ({q.size}, {p.size})')
        if self.convention not in (PLAIN, TILDE):
            raise ConventionError(f'Unknown convention "{self.convention}"')
        for name, arr in (('q_axis', q), ('p_axis', p), ('values', values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def value_at(self, q, p):
        i = int(np.argmin(np.abs(self.q_axis - q)))
        j = int(np.argmin(np.abs(self.p_axis - p)))
        return self.values[i, j]


def _default_axis(axis, extent, step):
    return symmetric_grid(extent, step) if axis is None else np.asarray(axis, dtype=float).ravel()


def _laguerre_log_iter(n, alpha, x):
    '''Yields (k, sign, log|L_k^alpha(x)|) for k = 0..n.'''
    log_scale = np.zeros_like(x)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(n + 1):
        if k == 1:
            prev, cur = cur, 1.0 + alpha - x
        elif k > 1:
            nxt = ((2.0 * k - 1.0 + alpha - x) * cur - (k - 1.0 + alpha) * prev) / k
            prev, cur = cur, nxt
        yield k, np.sign(cur), log_abs(cur) + log_scale
        if k and (k % RESCALE_EVERY == 0 or np.any(np.abs(cur) > _RESCALE_ABOVE)):
            scale = np.maximum(np.abs(cur), np.abs(prev))
            scale = np.where(scale > 0, scale, 1.0)
            cur = cur / scale
            prev = prev / scale
            log_scale = log_scale + np.log(scale)


def _check_laguerre(n, alpha, capacity):
    if n < 0 or alpha < 0 or int(alpha) != alpha:
        raise ArgumentError(f'Laguerre degree and order must be nonnegative integers, got ({n}, {alpha})')
    if n > capacity:
        raise CapacityError(f'Laguerre degree {n} exceeds the capacity of {capacity}')


def laguerre_values(n, alpha, x, capacity=LAGUERRE_CAPACITY):
    '''L_0^alpha(x)..L_n^alpha(x) stacked along the first axis.'''
    _check_laguerre(n, alpha, capacity)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError(f'Laguerre values are evaluated on x >= 0, got {np.min(x)}')
    out = np.empty((n + 1,) + x.shape)
    for k, sign, log_l in _laguerre_log_iter(n, alpha, x):
        out[k] = sign * np.exp(log_l)
    return out


def _radial_log_base(a, r):
    '''log of 2^{a/2} r^a e^{-r^2} / pi, without the factorial ratio.'''
    base = -r ** 2 - _LOG_PI
    if a:
        base = base + a * (0.5 * np.log(2.0) + log_abs(r))
    return base


def _pair_sweep(a, n_top, q, p):
    '''Yields (n, real part s_n) with Phi_{n+a,n} = s_n * e^{i a theta}, and the phase.'''
    r = np.hypot(q, p)
    phase = np.exp(1j * a * np.arctan2(p, -q)) if a else np.ones_like(r, dtype=complex)
    base = _radial_log_base(a, r)

    def sweep():
        for n, sign, log_l in _laguerre_log_iter(n_top, a, 2.0 * r ** 2):
            prefactor = 0.5 * (gammaln(n + 1.0) - gammaln(n + a + 1.0))
            parity = -1.0 if (n + a) % 2 else 1.0
            yield n, parity * sign * np.exp(base + prefactor + log_l)
    return phase, sweep()


def special_hermite(m, n, q, p, capacity=LAGUERRE_CAPACITY):
    if m < 0 or n < 0:
        raise ArgumentError(f'Indices must be nonnegative, got ({m}, {n})')
    if m < n:
        return special_hermite(n, m, q, -np.asarray(p, dtype=float), capacity=capacity)
    if n > capacity:
        raise CapacityError(f'min(m, n) = {n} exceeds the Laguerre capacity of {capacity}')
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    phase, sweep = _pair_sweep(m - n, n, q, p)
    for k, s in sweep:
        if k == n:
            value = s * phase
    return value[()] if value.ndim == 0 else value


def special_hermite_matrix(n_max, q, p, capacity=LAGUERRE_CAPACITY):
    '''All Phi_{m,n}(q,p) for m, n <= n_max, shape (n_max+1, n_max+1) + q.shape.'''
    if n_max > capacity:
        raise CapacityError(f'n_max={n_max} exceeds the Laguerre capacity of {capacity}')
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    out = np.empty((n_max + 1, n_max + 1) + q.shape, dtype=complex)
    for a in range(n_max + 1):
        phase, sweep = _pair_sweep(a, n_max - a, q, p)
        for n, s in sweep:
            out[n + a, n] = s * phase
            out[n, n + a] = s * np.conj(phase)
    return out


def _order_contribution(matrix, a, q_mesh, p_mesh):
    size = matrix.shape[0]
    n = np.arange(size - a)
    lower, upper = matrix[n + a, n], matrix[n, n + a]
    if not (np.any(lower) or np.any(upper)):
        return None
    phase, sweep = _pair_sweep(a, size - 1 - a, q_mesh, p_mesh)
    acc_lower = np.zeros(q_mesh.shape, dtype=complex)
    acc_upper = np.zeros(q_mesh.shape, dtype=complex) if a else None
    for k, s in sweep:
        if lower[k]:
            acc_lower += lower[k] * s
        if a and upper[k]:
            acc_upper += upper[k] * s
    total = acc_lower * phase
    if a:
        total += acc_upper * np.conj(phase)
    return total


def _chunk_contribution(matrix, orders, q_mesh, p_mesh):
    total = np.zeros(q_mesh.shape, dtype=complex)
    for a in orders:
        part = _order_contribution(matrix, a, q_mesh, p_mesh)
        if part is not None:
            total += part
    return total


def _synthesize(matrix, q_axis, p_axis, threads=1, capacity=LAGUERRE_CAPACITY):
    '''sum_{m,n} matrix[m,n] Phi_{m,n} on the grid q_axis x p_axis.'''
    matrix = check_finite(np.asarray(matrix, dtype=complex), 'Density matrix entries')
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ArgumentError(f'Expected a square matrix, got shape {matrix.shape}')
    if matrix.shape[0] - 1 > capacity:
        raise CapacityError(f'Truncation N={matrix.shape[0] - 1} exceeds the Laguerre capacity of {capacity}')
    q_mesh, p_mesh = np.meshgrid(q_axis, p_axis, indexing='ij')
    orders = range(matrix.shape[0])
    if threads <= 1:
        return _chunk_contribution(matrix, orders, q_mesh, p_mesh)
    # One accumulator per worker; orders are dealt round-robin.
    chunks = [orders[i::threads] for i in range(min(threads, len(orders)))]
    parts = Parallel(n_jobs=len(chunks), prefer='threads', return_as='generator')(
        delayed(_chunk_contribution)(matrix, chunk, q_mesh, p_mesh) for chunk in chunks)
    out = np.zeros(q_mesh.shape, dtype=complex)
    for part in parts:
        out += part
    return out


def wigner_of_density(rho, q_axis=None, p_axis=None, threads=1, capacity=LAGUERRE_CAPACITY):
    '''Phi_rho(q,p) = sum_{m,n} rho_{m,n} Phi_{m,n}(q,p).'''
    entries = np.asarray(getattr(rho, 'entries', rho), dtype=complex)
    q_axis = _default_axis(q_axis, PHASE_GRID_EXTENT, PHASE_GRID_STEP)
    p_axis = _default_axis(p_axis, PHASE_GRID_EXTENT, PHASE_GRID_STEP)
    values = _synthesize(entries, q_axis, p_axis, threads=threads, capacity=capacity)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    logger.debug('Wigner synthesis N=%d on %dx%d grid, imaginary residue %.3g',
                 entries.shape[0] - 1, q_axis.size, p_axis.size, residue)
    return PhaseSpaceGrid(q_axis, p_axis, values, PLAIN, imag_residue=residue)


def special_hermite_integral_matrix(n_max, q, p, epsabs=1e-13, epsrel=1e-11):
    '''(1/2pi) int e^{ipx} h_m(q - x/2) h_n(q + x/2) dx for all m, n <= n_max.

    q and p may be arrays of the same shape; every point shares one adaptive
    quadrature and the result gains leading axes of that shape.
    '''
    if n_max > ORACLE_MAX_INDEX:
        raise ArgumentError(f'Integral oracle is limited to indices <= {ORACLE_MAX_INDEX}')
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    shape = q.shape
    q, p = q.ravel(), p.ravel()
    size = n_max + 1
    half_width = 2.0 * (float(np.max(np.abs(q))) + np.sqrt(2.0 * n_max + 1.0) + 9.0)

    def integrand(x):
        left = hermite_values(n_max, q - 0.5 * x).T
        right = hermite_values(n_max, q + 0.5 * x).T
        value = left[:, :, None] * right[:, None, :] * np.exp(1j * p * x)[:, None, None]
        return np.concatenate([value.real.ravel(), value.imag.ravel()])

    res, err, info = quad_vec(integrand, -half_width, half_width, epsabs=epsabs, epsrel=epsrel,
                              norm='max', limit=10000, full_output=True)
    if not info.success:
        raise NumericError(f'Special Hermite integral did not converge on {q.size} point(s)',
                           diagnostics={'error': float(err), 'status': info.status, 'message': info.message})
    count = q.size * size * size
    values = (res[:count] + 1j * res[count:]) / (2.0 * np.pi)
    return values.reshape(shape + (size, size))


def special_hermite_integral(m, n, q, p, **kwargs):
    if max(m, n) > ORACLE_MAX_INDEX:
        raise ArgumentError(f'Integral oracle is limited to indices <= {ORACLE_MAX_INDEX}')
    return special_hermite_integral_matrix(max(m, n), q, p, **kwargs)[..., m, n]


def _radial_log_modulus(m, n, r, log_l):
    a = m - n
    return _radial_log_base(a, r) + 0.5 * (gammaln(n + 1.0) - gammaln(m + 1.0)) + log_l


def radial_modulus(m, n, r, capacity=LAGUERRE_CAPACITY):
    '''l_{m,n}(r) = |Phi_{m,n}(q,p)| for q^2 + p^2 = r^2.'''
    if m < n:
        m, n = n, m
    _check_laguerre(n, m - n, capacity)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError('Radial modulus is evaluated on r >= 0')
    for k, _, log_l in _laguerre_log_iter(n, m - n, 2.0 * r ** 2):
        if k == n:
            out = np.exp(_radial_log_modulus(m, n, r, log_l))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RadialBoundReport:
    '''Smallest K with l_{m,n}(r) <= K * envelope(r) for each pair m >= n.'''
    m_max: int
    k_limit: float
    pairs: np.ndarray = field(repr=False)
    pair_constants: np.ndarray = field(repr=False)
    worst_radii: np.ndarray = field(repr=False)

    @property
    def K(self):
        return float(np.max(self.pair_constants))

    @property
    def worst_pair(self):
        best = int(np.argmax(self.pair_constants))
        return tuple(int(v) for v in self.pairs[best])

    @property
    def worst_radius(self):
        return float(self.worst_radii[int(np.argmax(self.pair_constants))])

    @property
    def max_violation(self):
        return max(0.0, self.K - self.k_limit)

    @property
    def violations(self):
        bad = self.pair_constants > self.k_limit
        return [tuple(int(v) for v in pair) for pair in self.pairs[bad]]

    @property
    def verdict(self):
        return 'fail' if self.violations else 'pass'

    def slack(self, m, n):
        '''k_limit minus the constant needed by the pair (m, n).'''
        if m < n:
            m, n = n, m
        hit = np.flatnonzero((self.pairs[:, 0] == m) & (self.pairs[:, 1] == n))
        if hit.size == 0:
            raise ArgumentError(f'Pair ({m}, {n}) was not checked')
        return float(self.k_limit - self.pair_constants[hit[0]])

    def to_dict(self):
        return {'m_max': self.m_max, 'K': self.K, 'k_limit': self.k_limit, 'verdict': self.verdict,
                'worst_pair': self.worst_pair, 'worst_radius': self.worst_radius,
                'max_violation': self.max_violation,
                'violations': self.violations[:32]}


def radial_bound_check(m_max, r_grid, envelope_scale=1.0, k_limit=RADIAL_K_LIMIT,
                       capacity=LAGUERRE_CAPACITY):
    '''l_{m,n}(r) <= K {1 if r <= s; e^{-(r-s)^2} if r >= s}, s = sqrt(m+n+1).'''
    r = np.asarray(r_grid, dtype=float).ravel()
    reach = np.sqrt(2.0 * m_max + 1.0) + 6.0
    if r.size == 0 or np.any(r < 0) or r.min() > 0 or r.max() < reach:
        raise ArgumentError(f'r grid must cover [0, {reach:.6g}]')
    if envelope_scale <= 0:
        raise ArgumentError(f'envelope_scale must be positive, got {envelope_scale}')
    _check_laguerre(m_max, 0, capacity)
    pairs, constants, radii = [], [], []
    for a in range(m_max + 1):
        for n, _, log_l in _laguerre_log_iter(m_max - a, a, 2.0 * r ** 2):
            m = n + a
            s = np.sqrt(m + n + 1.0)
            log_env = np.log(envelope_scale) - np.where(r <= s, 0.0, (r - s) ** 2)
            excess = _radial_log_modulus(m, n, r, log_l) - log_env
            worst = int(np.argmax(excess))
            pairs.append((m, n))
            constants.append(float(np.exp(excess[worst])))
            radii.append(float(r[worst]))
    report = RadialBoundReport(m_max=int(m_max), k_limit=float(k_limit), pairs=np.array(pairs),
                               pair_constants=np.array(constants), worst_radii=np.array(radii))
    logger.info('Radial bound over m <= %d: K = %.6g at %s', m_max, report.K, report.worst_pair)
    return report


@dataclass(frozen=True)
class KrasikovReport:
    n_max: int
    alpha_max: int
    constant: float
    max_log_ratio: float
    worst: tuple
    printed_max_log_ratio: float

    @property
    def holds(self):
        return self.max_log_ratio <= 0.0

    def to_dict(self):
        return {'n_max': self.n_max, 'alpha_max': self.alpha_max, 'constant': self.constant,
                'holds': self.holds, 'max_log_ratio': self.max_log_ratio, 'worst': self.worst,
                'printed_form_max_log_ratio': self.printed_max_log_ratio}


def krasikov_check(n_max=200, alpha_max=50, x_grid=None, constant=KRASIKOV_CONSTANT):
    '''(n!/(n+alpha)!) L_n^alpha(x)^2 e^{-x} x^{alpha+1} <= C n^{-1/6} (n+alpha+1)^{1/2}, n >= 1.'''
    if x_grid is None:
        x_grid = np.linspace(0.0, 4.0 * n_max + 2.0 * alpha_max + 100.0, 4001)
    x = np.asarray(x_grid, dtype=float).ravel()
    if np.any(x < 0):
        raise DomainError('Krasikov check is evaluated on x >= 0')
    log_x = log_abs(x)
    best, worst, printed = -np.inf, None, -np.inf
    for a in range(alpha_max + 1):
        tail = -x + (a + 1.0) * log_x
        for k, _, log_l in _laguerre_log_iter(n_max, a, x):
            if k == 0:
                continue
            log_norm = gammaln(k + 1.0) - gammaln(k + a + 1.0)
            lhs = 2.0 * log_l + tail
            rhs = np.log(constant) - np.log(k) / 6.0 + 0.5 * np.log(k + a + 1.0)
            peak = int(np.argmax(lhs))
            ratio = float(lhs[peak] + log_norm - rhs)
            if ratio > best:
                best, worst = ratio, (k, a, float(x[peak]))
            printed = max(printed, float(lhs[peak] - rhs))
    return KrasikovReport(n_max=int(n_max), alpha_max=int(alpha_max), constant=float(constant),
                          max_log_ratio=best, worst=worst, printed_max_log_ratio=printed)


def wigner_pure_direct(f, q_axis, p_axis, support=12.0, epsabs=1e-13, epsrel=1e-11):
    '''(1/2pi) int e^{ipx} f(q - x/2) conj(f(q + x/2)) dx by adaptive quadrature.'''
    q_axis = np.asarray(q_axis, dtype=float).ravel()
    p_axis = np.asarray(p_axis, dtype=float).ravel()
    notes = []
    edge = max(abs(complex(f(-support))), abs(complex(f(support))))
    if edge > 1e-14:
        msg = f'f has not decayed at |x| = {support} (|f| = {edge:.3g})'
        warnings.warn(msg, TruncationWarning)
        notes.append(msg)
    values = np.empty((q_axis.size, p_axis.size), dtype=complex)
    for i, q in enumerate(q_axis):
        half_width = 2.0 * (support + abs(q))

        def integrand(x):
            g = complex(f(q - 0.5 * x)) * np.conj(complex(f(q + 0.5 * x)))
            value = g * np.exp(1j * p_axis * x)
            return np.concatenate([value.real, value.imag])

        res, err, info = quad_vec(integrand, -half_width, half_width, epsabs=epsabs, epsrel=epsrel,
                                  norm='max', limit=10000, full_output=True)
        if not info.success:
            raise NumericError(f'Wigner integral did not converge at q = {q}',
                               diagnostics={'error': float(err), 'status': info.status})
        values[i] = (res[:p_axis.size] + 1j * res[p_axis.size:]) / (2.0 * np.pi)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    return PhaseSpaceGrid(q_axis, p_axis, values, PLAIN, imag_residue=residue, warnings=tuple(notes))


def tilde_rescale(grid):
    '''Phi~(q,p) = Phi(q/sqrt2, p/sqrt2) / 2.'''
    if grid.convention == TILDE:
        raise ConventionError('Grid is already in the tilde convention')
    root2 = np.sqrt(2.0)
    return PhaseSpaceGrid(grid.q_axis * root2, grid.p_axis * root2, grid.values / 2.0, TILDE,
                          imag_residue=grid.imag_residue / 2.0, warnings=grid.warnings)


def _boundary_max(values):
    return max(np.max(np.abs(values[0])), np.max(np.abs(values[-1])),
               np.max(np.abs(values[:, 0])), np.max(np.abs(values[:, -1])))


def marginals(grid, decay=BOUNDARY_DECAY):
    '''(int Phi dp, int Phi dq) by the trapezoid rule.'''
    values = check_finite(grid.values, 'Phase-space values')
    edge = _boundary_max(values)
    if edge > decay:
        warnings.warn(f'Phase-space values have not decayed at the grid boundary (|Phi| = {edge:.3g})',
                      TruncationWarning)
    q_marginal = trapezoid(values, grid.p_axis, axis=1).real
    p_marginal = trapezoid(values, grid.q_axis, axis=0).real
    return q_marginal, p_marginal


def ambiguity_of_coefficients(alpha, theta_axis=None, varpi_axis=None, threads=1):
    '''A(f,f)(theta, varpi) = sum_{m,n} (-i)^{m+n}/2 alpha_m conj(alpha_n) Phi_{m,n}(theta/2, varpi/2).'''
    values = np.asarray(getattr(alpha, 'values', alpha), dtype=complex)
    theta_axis = _default_axis(theta_axis, AMBIGUITY_GRID_EXTENT, AMBIGUITY_GRID_STEP)
    varpi_axis = _default_axis(varpi_axis, AMBIGUITY_GRID_EXTENT, AMBIGUITY_GRID_STEP)
    turns = np.array([1, -1j, -1, 1j])[np.arange(values.size) % 4]
    weighted = turns * values
    matrix = 0.5 * np.outer(weighted, values.conj())
    # (-i)^{m+n} = (-i)^m (-i)^n, folded into the row factor.
    matrix = matrix * turns[None, :]
    out = _synthesize(matrix, 0.5 * theta_axis, 0.5 * varpi_axis, threads=threads)
    return PhaseSpaceGrid(theta_axis, varpi_axis, out, PLAIN)


def fourier_2d(grid, theta_axis, varpi_axis):
    '''(1/2pi) double integral of Phi(q,p) e^{-i(theta q + varpi p)} by the trapezoid rule.'''
    theta_axis = np.asarray(theta_axis, dtype=float).ravel()
    varpi_axis = np.asarray(varpi_axis, dtype=float).ravel()
    right = np.exp(-1j * np.outer(varpi_axis, grid.p_axis))
    values = np.empty((theta_axis.size, varpi_axis.size), dtype=complex)
    for i, theta in enumerate(theta_axis):
        over_q = trapezoid(np.exp(-1j * theta * grid.q_axis)[:, None] * grid.values, grid.q_axis, axis=0)
        values[i] = trapezoid(right * over_q[None, :], grid.p_axis, axis=1)
    values /= 2.0 * np.pi
    return PhaseSpaceGrid(theta_axis, varpi_axis, values, grid.convention)


def isometry_ratio(alpha, extent=12.0, step=COMPARISON_GRID_STEP, threads=1):
    '''double integral of |Phi~(f,f)|^2 divided by (sum |alpha_n|^2)^2.'''
    values = np.asarray(getattr(alpha, 'values', alpha), dtype=complex)
    axis = symmetric_grid(extent, step)
    grid = wigner_of_density(np.outer(values, values.conj()), axis, axis, threads=threads)
    tilde = tilde_rescale(grid)
    mass = trapezoid(trapezoid(np.abs(tilde.values) ** 2, tilde.p_axis, axis=1), tilde.q_axis)
    return float(mass / np.sum(np.abs(values) ** 2) ** 2)


def _require_strict_growth(w, axiom_grid):
    axioms = check_weight_axioms(w, axiom_grid)
    if not axioms.passed('v'):
        raise PreconditionError(f'Norm comparison needs axiom (v); verdict was "{axioms["v"].verdict}"')


def _comparison_axis(n_max, step):
    return symmetric_grid(max(PHASE_GRID_EXTENT, np.sqrt(2.0 * n_max + 1.0) + 6.0), step)


def wigner_norm_comparison(rho, w, cbar_grid=CBAR_GRID, q_axis=None, p_axis=None,
                           axiom_grid=AXIOM_GRID, step=COMPARISON_GRID_STEP, threads=1):
    '''Ratios |Phi_rho|_omega / ||rho||_{C̄ omega}.'''
    _require_strict_growth(w, axiom_grid)
    entries = np.asarray(getattr(rho, 'entries', rho), dtype=complex)
    axis = _comparison_axis(entries.shape[0] - 1, step)
    grid = wigner_of_density(entries, axis if q_axis is None else q_axis,
                             axis if p_axis is None else p_axis, threads=threads)
    lhs = phase_space_norm(grid, w)
    rhs = tuple(matrix_norm(entries, w.scaled(c)) for c in cbar_grid)
    return TameBoundReport('wigner', tuple(cbar_grid), lhs, rhs, tuple(_ratio(lhs, r) for r in rhs))


def _two_sided(name, cbar_grid, plain_norm, quadratic_norm):
    upper_lhs = plain_norm(1.0)
    lower_lhs = quadratic_norm(1.0)
    upper_rhs = tuple(quadratic_norm(c) for c in cbar_grid)
    lower_rhs = tuple(plain_norm(c) for c in cbar_grid)
    return (TameBoundReport(f'{name}_dominates', tuple(cbar_grid), upper_lhs, upper_rhs,
                            tuple(_ratio(upper_lhs, r) for r in upper_rhs)),
            TameBoundReport(f'{name}_dominated', tuple(cbar_grid), lower_lhs, lower_rhs,
                            tuple(_ratio(lower_lhs, r) for r in lower_rhs)))


def _plain_norms(series, w, step):
    x = _comparison_axis(series.alpha.n_max, step / 4.0)
    samples = SampledFunction(x, series(x))
    fourier_samples = SampledFunction(x, series.fourier()(x))
    return lambda c: function_norm(samples, fourier_samples, w.scaled(c))


def pure_norm_comparison(alpha, w, cbar_grid=CBAR_GRID, axiom_grid=AXIOM_GRID,
                         step=COMPARISON_GRID_STEP, threads=1):
    '''||f||_omega against the quadratic norm sqrt(|Phi(f,f)|_omega), both directions.

    Returns (||f||_omega / flat_{C̄ omega}, flat_omega / ||f||_{C̄ omega}).
    '''
    _require_strict_growth(w, axiom_grid)
    series = HermiteSeries(alpha)
    values = series.alpha.values
    axis = _comparison_axis(series.alpha.n_max, step)
    grid = wigner_of_density(np.outer(values, values.conj()), axis, axis, threads=threads)
    return _two_sided('flat', cbar_grid, _plain_norms(series, w, step),
                      lambda c: flat_norm(grid, w.scaled(c)))


def ambiguity_norm_comparison(alpha, w, cbar_grid=CBAR_GRID, axiom_grid=AXIOM_GRID,
                              step=COMPARISON_GRID_STEP, threads=1):
    '''||f||_omega against sqrt(|A(f,f)|_omega), both directions.'''
    _require_strict_growth(w, axiom_grid)
    series = HermiteSeries(alpha)
    axis = 2.0 * _comparison_axis(series.alpha.n_max, step)
    grid = ambiguity_of_coefficients(series.alpha, axis, axis, threads=threads)
    return _two_sided('ambiguity', cbar_grid, _plain_norms(series, w, step),
                      lambda c: float(np.sqrt(phase_space_norm(grid, w.scaled(c)))))
