'''Weight functions omega, their axioms, the convex conjugate and the omega-norms.'''
import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .errors import (ArgumentError, DataError, DomainError, ExtrapolationError,
                     NumericError)
from .utils import (DIVERGENCE_BAND, attained_in_band, band_mask, check_finite,
                    log_abs)


logger = logging.getLogger(__name__)

POWER = 'power'
TABULATED = 'tabulated'
AXIOM_GRID = np.logspace(-2, 4, 601)
AXIOM_RTOL = 1e-9
OMEGA_STAR_BRACKET = (-60.0, 60.0)
OMEGA_STAR_XATOL = 1e-10

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'

AXIOM_LABELS = {
    'i': 'Omega(t) = omega(e^t) is convex',
    'ii': 'log(t) / omega(t) -> 0',
    'iii': 'omega(2t) = O(omega(t))',
    'iv': 'limsup omega(t) / t^2 <= 1/2',
    'v': 'limsup omega(t) / t^2 < 1/2',
}


@dataclass(frozen=True)
class WeightFunction:
    '''omega(t) = lam * t^beta, or lam times a monotone interpolant of a table.'''
    family: str
    lam: float = 1.0
    beta: float = 1.0
    table: tuple = None

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ArgumentError(f'Weight scale lambda must be positive, got {self.lam}')
        if self.family == POWER:
            if not 0 < self.beta <= 2:
                raise ArgumentError(f'Power weight exponent must lie in (0, 2], got {self.beta}')
            return
        if self.family != TABULATED:
            raise ArgumentError(f'Unknown weight family "{self.family}"')
        if self.table is None:
            raise ArgumentError('A tabulated weight needs a table of (t, omega) points')
        t, w = (np.asarray(col, dtype=float) for col in self.table)
        if t.size < 2 or t.shape != w.shape:
            raise ArgumentError('A tabulated weight needs at least two (t, omega) points')
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
            raise ArgumentError('Weight table contains non-finite values')
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ArgumentError('Weight table abscissae must be nonnegative and strictly increasing')
        if w[0] < 0 or np.any(np.diff(w) < 0):
            raise ArgumentError('Weight table values must be nonnegative and nondecreasing')
        object.__setattr__(self, 'table', (tuple(t.tolist()), tuple(w.tolist())))
        object.__setattr__(self, '_interp', PchipInterpolator(t, w, extrapolate=False))

    @classmethod
    def power(cls, lam, beta):
        return cls(POWER, lam=float(lam), beta=float(beta))

    @classmethod
    def tabulated(cls, points, lam=1.0):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ArgumentError('Tabulated weight points must be a list of [t, omega] pairs')
        return cls(TABULATED, lam=float(lam), table=(tuple(points[:, 0]), tuple(points[:, 1])))

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or 'family' not in obj:
            raise DataError('Weight JSON must be an object with a "family" key')
        try:
            if obj['family'] == POWER:
                return cls.power(obj['lambda'], obj['beta'])
            if obj['family'] == TABULATED:
                return cls.tabulated(obj['points'], obj.get('lambda', 1.0))
        except KeyError as err:
            raise DataError(f'Weight JSON is missing the key {err}') from None
        except (TypeError, ValueError) as err:
            raise DataError(f'Invalid weight JSON: {err}') from None
        raise DataError(f'Unknown weight family "{obj["family"]}"')

    def to_json(self):
        if self.family == POWER:
            return {'family': POWER, 'lambda': self.lam, 'beta': self.beta}
        return {'family': TABULATED, 'lambda': self.lam,
                'points': [list(pair) for pair in zip(*self.table)]}

    @property
    def domain(self):
        if self.family == POWER:
            return 0.0, np.inf
        return self.table[0][0], self.table[0][-1]

    def scaled(self, c):
        '''The member c * omega of the class of omega.'''
        if not c > 0:
            raise ArgumentError(f'Scale factor must be positive, got {c}')
        return replace(self, lam=self.lam * c)

    def __call__(self, t):
        return eval_omega(self, t)

    def Omega(self, t):
        return eval_omega(self, np.exp(t))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == POWER:
            with np.errstate(divide='ignore'):
                return self.lam * self.beta * t ** (self.beta - 1.0)
        self._check_range(t)
        return self.lam * self._interp.derivative()(t)

    def _check_range(self, t):
        lo, hi = self.domain
        if np.any(t < lo) or np.any(t > hi):
            raise ExtrapolationError(f'Tabulated weight is only defined on [{lo}, {hi}]')


def eval_omega(w, t):
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)):
        raise DataError('omega evaluated at NaN')
    if np.any(t < 0):
        raise DomainError(f'omega is defined on [0, inf), got t={np.min(t)}')
    if w.family == POWER:
        out = w.lam * t ** w.beta
    else:
        w._check_range(t)
        out = w.lam * w._interp(t)
    return float(out) if scalar else out


@dataclass(frozen=True)
class AxiomVerdict:
    key: str
    verdict: str
    witness: float = None
    observed: float = None

    @property
    def label(self):
        return AXIOM_LABELS[self.key]

    def to_dict(self):
        return {'axiom': self.key, 'label': self.label, 'verdict': self.verdict,
                'witness': self.witness, 'observed': self.observed}


@dataclass(frozen=True)
class AxiomReport:
    verdicts: tuple

    def __getitem__(self, key):
        for verdict in self.verdicts:
            if verdict.key == key:
                return verdict
        raise KeyError(key)

    def passed(self, key):
        return self[key].verdict == PASS

    @property
    def failures(self):
        return [v for v in self.verdicts if v.verdict == FAIL]

    def to_dict(self):
        return {v.key: v.to_dict() for v in self.verdicts}


def _nonincreasing(values, rtol):
    return bool(np.all(np.diff(values) <= rtol * np.maximum(1.0, np.abs(values[1:]))))


def _check_convexity(t, values, rtol):
    u = np.log(t)
    slopes = np.diff(values) / np.diff(u)
    bends = np.diff(slopes)
    bad = np.flatnonzero(bends < -rtol * np.maximum(1.0, np.abs(slopes[1:])))
    if bad.size:
        return AxiomVerdict('i', FAIL, witness=float(t[bad[0] + 1]), observed=float(bends[bad[0]]))
    return AxiomVerdict('i', PASS, observed=float(np.min(bends)) if bends.size else None)


def _check_log_growth(t, values, tail, rtol):
    tail = tail & (t > 1.0)
    if np.count_nonzero(tail) < 2:
        return AxiomVerdict('ii', INCONCLUSIVE)
    tt, vv = t[tail], values[tail]
    if np.any(vv == 0):
        return AxiomVerdict('ii', FAIL, witness=float(tt[np.flatnonzero(vv == 0)[-1]]), observed=np.inf)
    ratio = np.log(tt) / vv
    if _nonincreasing(ratio, rtol):
        return AxiomVerdict('ii', PASS, witness=None, observed=float(ratio[-1]))
    if vv[-1] <= vv[0] * (1.0 + rtol):
        return AxiomVerdict('ii', FAIL, witness=float(tt[-1]), observed=float(ratio[-1]))
    return AxiomVerdict('ii', INCONCLUSIVE, observed=float(ratio[-1]))


def _check_doubling(w, t, values, tail, rtol):
    hi = w.domain[1]
    usable = (2.0 * t <= hi) & (values > 0)
    if np.count_nonzero(usable) < 2:
        return AxiomVerdict('iii', INCONCLUSIVE)
    ratio = eval_omega(w, 2.0 * t[usable]) / values[usable]
    best = int(np.argmax(ratio))
    tail_ratio = ratio[tail[usable]]
    verdict = PASS if tail_ratio.size >= 2 and _nonincreasing(tail_ratio, rtol) else INCONCLUSIVE
    return AxiomVerdict('iii', verdict, witness=float(t[usable][best]), observed=float(ratio[best]))


def _check_critical_growth(key, t, values, tail, rtol):
    if np.count_nonzero(tail) < 2:
        return AxiomVerdict(key, INCONCLUSIVE)
    tt = t[tail]
    ratio = values[tail] / tt ** 2
    if key == 'iv':
        too_big = np.min(ratio) > 0.5 * (1.0 + rtol)
        small_enough = ratio[-1] <= 0.5 * (1.0 + rtol)
    else:
        too_big = np.min(ratio) >= 0.5 * (1.0 - rtol)
        small_enough = ratio[-1] < 0.5 * (1.0 - rtol)
    if too_big:
        return AxiomVerdict(key, FAIL, witness=float(tt[-1]), observed=float(ratio[-1]))
    if small_enough and _nonincreasing(ratio, rtol):
        return AxiomVerdict(key, PASS, observed=float(ratio[-1]))
    return AxiomVerdict(key, INCONCLUSIVE, witness=float(tt[-1]), observed=float(ratio[-1]))


def check_weight_axioms(w, grid=AXIOM_GRID, rtol=AXIOM_RTOL):
    '''Grid verdicts for axioms (i)-(v); limits that cannot be certified are inconclusive.'''
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ArgumentError('Axiom grid is empty')
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ArgumentError('Axiom grid must be positive and strictly increasing')
    if grid[0] > 1e-2 or grid[-1] < 1e4:
        raise ArgumentError('Axiom grid must span at least [1e-2, 1e4]')
    lo, hi = w.domain
    t = grid[(grid >= lo) & (grid <= hi)]
    if t.size < 3:
        logger.warning('Weight table covers fewer than 3 axiom grid points')
        return AxiomReport(tuple(AxiomVerdict(key, INCONCLUSIVE) for key in AXIOM_LABELS))
    values = eval_omega(w, t)
    tail = t >= t[-1] / 10.0
    return AxiomReport((
        _check_convexity(t, values, rtol),
        _check_log_growth(t, values, tail, rtol),
        _check_doubling(w, t, values, tail, rtol),
        _check_critical_growth('iv', t, values, tail, rtol),
        _check_critical_growth('v', t, values, tail, rtol),
    ))


def omega_star(w, nu, full_output=False):
    '''Convex conjugate Omega*(nu) = sup_t (nu t - Omega(t)).'''
    if nu < 0:
        raise DomainError(f'Omega* is evaluated on [0, inf), got nu={nu}')
    nu = float(nu)
    if w.family == POWER:
        if nu == 0:
            value, argmax = 0.0, -np.inf
        else:
            argmax = np.log(nu / (w.lam * w.beta)) / w.beta
            value = nu * argmax - nu / w.beta
        info = {'method': 'closed_form', 'argmax': argmax}
        return (value, info) if full_output else value

    t_min, t_max = w.domain
    lo = max(OMEGA_STAR_BRACKET[0], np.log(t_min)) if t_min > 0 else OMEGA_STAR_BRACKET[0]
    hi = min(OMEGA_STAR_BRACKET[1], np.log(t_max))
    diagnostics = {'nu': nu, 'bracket': (lo, hi)}
    if nu == 0:
        if t_min > 0:
            raise NumericError('Omega*(0) is attained below the weight table', diagnostics)
        value, argmax = -float(eval_omega(w, 0.0)), -np.inf
        info = {'method': 'bounded_search', 'argmax': argmax, 'evaluations': 0}
        return (value, info) if full_output else value

    res = minimize_scalar(lambda s: float(w.Omega(s)) - nu * s, bounds=(lo, hi), method='bounded',
                          options={'xatol': OMEGA_STAR_XATOL, 'maxiter': 500})
    diagnostics.update(argmax=float(res.x), evaluations=int(res.nfev))
    if not res.success:
        raise NumericError(f'Omega* search did not converge: {res.message}', diagnostics)
    if min(res.x - lo, hi - res.x) < 1e3 * OMEGA_STAR_XATOL:
        raise NumericError('Omega* objective is still increasing at the end of the bracket', diagnostics)
    info = {'method': 'bounded_search', 'argmax': float(res.x), 'evaluations': int(res.nfev)}
    value = -float(res.fun)
    return (value, info) if full_output else value


def _sup(log_terms, mask, flag_divergence):
    best = np.unravel_index(int(np.argmax(log_terms)), log_terms.shape)
    with np.errstate(over='ignore'):
        value = float(np.exp(log_terms[best]))
    divergent = flag_divergence and attained_in_band(log_terms, mask)
    return value, best, divergent


def _finish(value, divergent, info, full_output):
    info['grid_value'] = value
    info['divergent'] = divergent
    if divergent:
        logger.debug('Supremum attained in the boundary band: %s', info)
        value = np.inf
    return (value, info) if full_output else value


def function_norm(f_samples, ff_samples, w, flag_divergence=True, band=DIVERGENCE_BAND,
                  full_output=False):
    '''Grid value of sup |f| e^{omega(|x|)} + sup |F f| e^{omega(|xi|)}.'''
    parts = []
    divergent = False
    for samples in (f_samples, ff_samples):
        if len(samples) == 0:
            raise ArgumentError('function_norm needs nonempty sample sets')
        values = check_finite(samples.values, 'Function samples')
        log_terms = log_abs(values) + eval_omega(w, np.abs(samples.x))
        value, best, hit = _sup(log_terms, band_mask(len(samples), band), flag_divergence)
        parts.append((value, float(samples.x[best])))
        divergent = divergent or hit
    info = {'f_sup': parts[0][0], 'witness_x': parts[0][1],
            'fourier_sup': parts[1][0], 'witness_xi': parts[1][1]}
    return _finish(parts[0][0] + parts[1][0], divergent, info, full_output)


def sequence_norm(alpha, w, flag_divergence=True, band=DIVERGENCE_BAND, full_output=False):
    '''sup_n |alpha_n| e^{omega(sqrt n)}.'''
    values = check_finite(getattr(alpha, 'values', alpha), 'Hermite coefficients')
    n = np.arange(len(values))
    log_terms = log_abs(values) + eval_omega(w, np.sqrt(n))
    mask = band_mask(len(values), band, both_ends=False)
    value, best, divergent = _sup(log_terms, mask, flag_divergence)
    return _finish(value, divergent, {'witness_n': int(best[0])}, full_output)


def matrix_norm(rho, w, flag_divergence=True, band=DIVERGENCE_BAND, full_output=False):
    '''sup_{m,n} |rho_{m,n}| e^{omega(sqrt m) + omega(sqrt n)}.'''
    entries = check_finite(getattr(rho, 'entries', rho), 'Density matrix entries')
    size = entries.shape[0]
    weight = eval_omega(w, np.sqrt(np.arange(size)))
    log_terms = log_abs(entries) + weight[:, None] + weight[None, :]
    edge = band_mask(size, band, both_ends=False)
    value, best, divergent = _sup(log_terms, edge[:, None] | edge[None, :], flag_divergence)
    return _finish(value, divergent, {'witness_mn': (int(best[0]), int(best[1]))}, full_output)


def phase_space_norm(grid, w, flag_divergence=True, band=DIVERGENCE_BAND, full_output=False):
    '''sup |Phi(q,p)| e^{2(omega(|q|) + omega(|p|))} over the grid.'''
    values = check_finite(grid.values, 'Phase-space values')
    wq = eval_omega(w, np.abs(grid.q_axis))
    wp = eval_omega(w, np.abs(grid.p_axis))
    log_terms = log_abs(values) + 2.0 * (wq[:, None] + wp[None, :])
    mask = band_mask(len(wq), band)[:, None] | band_mask(len(wp), band)[None, :]
    value, best, divergent = _sup(log_terms, mask, flag_divergence)
    info = {'witness_qp': (float(grid.q_axis[best[0]]), float(grid.p_axis[best[1]]))}
    return _finish(value, divergent, info, full_output)


def flat_norm(grid, w, **kwargs):
    '''sqrt(|Phi(f,f)|_omega) for the Wigner grid of a pure state.'''
    if kwargs.get('full_output'):
        value, info = phase_space_norm(grid, w, **kwargs)
        return np.sqrt(value), info
    return float(np.sqrt(phase_space_norm(grid, w, **kwargs)))
