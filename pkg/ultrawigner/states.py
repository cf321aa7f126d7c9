'''Fock-basis density matrices.'''
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigvalsh

from .decay import fit_envelope
from .errors import ArgumentError, FitDegenerateError, NumericError
from .hermite import CoefficientSequence
from .phase_space import laguerre_values
from .utils import check_finite


logger = logging.getLogger(__name__)

PURE = 'pure'
EXPLICIT = 'explicit'
COUNTEREXAMPLE = 'counterexample'
PROVENANCES = (PURE, EXPLICIT, COUNTEREXAMPLE)

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-8
MIXTURE_WEIGHT_TOL = 1e-10
MIXTURE_GRAM_TOL = 1e-8
CLOSED_FORM_EPSREL = 1e-10
# Past x + 40 the factor e^{-v} is below 5e-18.
_CLOSED_FORM_SPLIT = 40.0


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray
    provenance: str = EXPLICIT

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.size == 0:
            raise ArgumentError(f'A density matrix must be square and nonempty, got shape {entries.shape}')
        if self.provenance not in PROVENANCES:
            raise ArgumentError(f'Unknown provenance "{self.provenance}"')
        check_finite(entries, 'Density matrix entries')
        if self.provenance != COUNTEREXAMPLE:
            asymmetry = float(np.max(np.abs(entries - entries.conj().T)))
            if asymmetry > HERMITIAN_TOL:
                raise ArgumentError(f'Density matrix is not Hermitian (max |rho - rho^H| = {asymmetry:.3g})')
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def n_max(self):
        return self.entries.shape[0] - 1

    def trace(self):
        return complex(np.trace(self.entries))


def _as_sequence(alpha):
    return alpha if isinstance(alpha, CoefficientSequence) else CoefficientSequence(alpha)


def pure_state_density(alpha):
    '''rho_{m,n} = alpha_m conj(alpha_n).'''
    values = _as_sequence(alpha).values
    return DensityMatrix(np.outer(values, values.conj()), PURE)


def mixture_density(weights, states):
    '''sum_i p_i |psi_i><psi_i| for orthonormal psi_i.'''
    weights = np.asarray(weights, dtype=float).ravel()
    states = [_as_sequence(s) for s in states]
    if weights.size != len(states) or not states:
        raise ArgumentError(f'Got {weights.size} weights for {len(states)} states')
    if np.any(weights < 0):
        raise ArgumentError(f'Mixture weights must be nonnegative, got {weights.min()}')
    if abs(weights.sum() - 1.0) > MIXTURE_WEIGHT_TOL:
        raise ArgumentError(f'Mixture weights sum to {weights.sum():.17g}, not 1')
    n_max = max(s.n_max for s in states)
    basis = np.array([s.padded(n_max).values for s in states])
    gram = basis.conj() @ basis.T
    deviation = float(np.max(np.abs(gram - np.eye(len(states)))))
    if deviation > MIXTURE_GRAM_TOL:
        raise ArgumentError(f'Mixture states are not orthonormal (max Gram deviation {deviation:.3g})')
    entries = np.einsum('i,im,in->mn', weights, basis, basis.conj())
    return DensityMatrix(entries, EXPLICIT)


def counterexample_density(n_max):
    '''Diagonal matrix with rho_{m,m} = (-1)^m / ((m+1)(m+2)).'''
    if n_max < 0:
        raise ArgumentError(f'n_max must be nonnegative, got {n_max}')
    m = np.arange(n_max + 1)
    diagonal = np.where(m % 2, -1.0, 1.0) / ((m + 1.0) * (m + 2.0))
    return DensityMatrix(np.diag(diagonal).astype(complex), COUNTEREXAMPLE)


@dataclass(frozen=True)
class ValidationReport:
    hermitian: str
    max_asymmetry: float
    psd: str
    min_eigenvalue: float
    trace: float
    trace_verdict: str
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.hermitian == 'pass' and self.psd == 'pass' and self.trace_verdict != 'fail'

    def to_dict(self):
        return {'hermitian': self.hermitian, 'max_asymmetry': self.max_asymmetry, 'psd': self.psd,
                'min_eigenvalue': self.min_eigenvalue, 'trace': self.trace,
                'trace_verdict': self.trace_verdict, 'witnesses': self.witnesses}


def validate_density(rho, hermitian_tol=HERMITIAN_TOL, psd_tol=PSD_TOL, trace_tol=TRACE_TOL):
    '''Hermitian symmetry, positivity and unit trace; findings are reported, never raised.'''
    entries = rho.entries
    asymmetry = float(np.max(np.abs(entries - entries.conj().T)))
    hermitian_part = 0.5 * (entries + entries.conj().T)
    eigenvalues = eigvalsh(hermitian_part)
    lowest = int(np.argmin(eigenvalues))
    diagonal = entries.diagonal().real
    trace = float(diagonal.sum())
    n_max = rho.n_max

    if abs(trace - 1.0) <= trace_tol:
        trace_verdict = 'pass'
    elif rho.provenance == COUNTEREXAMPLE and abs(trace - 1.0) <= 1.0 / ((n_max + 2.0) * (n_max + 3.0)):
        trace_verdict = 'truncated'
    else:
        trace_verdict = 'fail'
    witnesses = {'min_eigenvalue_index': lowest,
                 'most_negative_diagonal': [int(np.argmin(diagonal)), float(diagonal.min())],
                 'n_max': n_max, 'provenance': rho.provenance}
    report = ValidationReport(hermitian='pass' if asymmetry <= hermitian_tol else 'fail',
                              max_asymmetry=asymmetry,
                              psd='pass' if eigenvalues[lowest] >= -psd_tol else 'fail',
                              min_eigenvalue=float(eigenvalues[lowest]), trace=trace,
                              trace_verdict=trace_verdict, witnesses=witnesses)
    logger.debug('Validated %s density (N=%d): %s', rho.provenance, n_max, report.to_dict())
    return report


def _closed_form_at(x):
    if x == 0:
        return 1.0 / np.pi
    total = 0.0
    # int_0^inf e^{-v} x/(x+v)^2 dv, split where the integrand changes scale.
    for lo, hi in ((0.0, x), (x, x + _CLOSED_FORM_SPLIT), (x + _CLOSED_FORM_SPLIT, np.inf)):
        out = quad(lambda v: np.exp(-v) * x / (x + v) ** 2, lo, hi, epsabs=0.0,
                   epsrel=CLOSED_FORM_EPSREL, limit=200, full_output=1)
        if len(out) > 3:
            raise NumericError(f'Counterexample integral did not converge at x = {x}',
                               diagnostics={'interval': (lo, hi), 'error': out[1], 'message': out[3]})
        total += out[0]
    return np.exp(-0.5 * x) * total / np.pi


def counterexample_wigner_closed_form(q, p):
    '''Phi_rho(q,p) = (e^{-x/2}/pi) int_0^inf e^{-v} x/(x+v)^2 dv, x = 2(q^2 + p^2).'''
    x = 2.0 * (np.asarray(q, dtype=float) ** 2 + np.asarray(p, dtype=float) ** 2)
    out = np.array([_closed_form_at(float(v)) for v in x.ravel()]).reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def counterexample_series(q, p, M):
    '''Truncated sum over m <= M of rho_{m,m} Phi_{m,m}(q,p), with the bound 1/(pi(M+2)) on the rest.'''
    if M < 0:
        raise ArgumentError(f'M must be nonnegative, got {M}')
    x = 2.0 * (np.asarray(q, dtype=float) ** 2 + np.asarray(p, dtype=float) ** 2)
    m = np.arange(M + 1)
    # (-1)^m from the matrix cancels (-1)^m in Phi_{m,m}.
    coefficients = 1.0 / ((m + 1.0) * (m + 2.0))
    values = np.exp(-0.5 * x) * np.tensordot(coefficients, laguerre_values(M, 0, x), axes=(0, 0)) / np.pi
    values = float(values) if np.ndim(values) == 0 else values
    return values, 1.0 / (np.pi * (M + 2.0))


def _gaussian_slope(r, log_values, window):
    lo, hi = window
    mask = (r >= lo) & (r <= hi)
    if mask.sum() < 2:
        raise ArgumentError(f'Fit window {window} holds fewer than two grid points')
    return float(np.polyfit(r[mask] ** 2, log_values[mask], 1)[0])


@dataclass(frozen=True)
class ExperimentReport:
    n_max: int
    diagonal_fit: str
    diagonal_residual: float
    diagonal_beta: float
    fit_window: tuple
    slope: float
    near_window: tuple
    near_slope: float
    positive: bool
    bound_holds: bool
    series_error: float
    series_tail_bound: float

    def to_dict(self):
        return {'n_max': self.n_max, 'diagonal_fit': self.diagonal_fit,
                'diagonal_residual': self.diagonal_residual, 'diagonal_beta': self.diagonal_beta,
                'fit_window': list(self.fit_window), 'slope': self.slope,
                'near_window': list(self.near_window), 'near_slope': self.near_slope,
                'positive': self.positive, 'bound_holds': self.bound_holds,
                'series_error': self.series_error, 'series_tail_bound': self.series_tail_bound}


def decay_vs_wigner_experiment(n_max=400, r_grid=None, fit_window=(4.0, 8.0), near_window=(1.0, 3.0)):
    '''Algebraic decay of the diagonal next to Gaussian decay of the Wigner function.'''
    if n_max < 64:
        raise ArgumentError(f'The experiment needs n_max >= 64, got {n_max}')
    r = np.linspace(0.0, 8.0, 129) if r_grid is None else np.asarray(r_grid, dtype=float).ravel()
    rho = counterexample_density(n_max)
    diagonal = np.abs(rho.entries.diagonal())
    try:
        envelope = fit_envelope(diagonal)
        diagonal_fit, residual, beta = 'exponential', envelope.residual, envelope.beta_hat
    except FitDegenerateError as err:
        diagonal_fit, residual, beta = 'degenerate', err.residual, err.beta_hat
    logger.info('Diagonal envelope fit: %s (residual %s)', diagonal_fit, residual)

    values = counterexample_wigner_closed_form(r, 0.0)
    positive = bool(np.all(values > 0))
    bound_holds = bool(np.all(values <= np.exp(-r ** 2) / np.pi * (1.0 + 1e-12)))
    log_values = np.log(np.where(values > 0, values, np.nan))
    near = r <= 2.0
    series, tail_bound = counterexample_series(r[near], 0.0, n_max)
    return ExperimentReport(
        n_max=int(n_max), diagonal_fit=diagonal_fit,
        diagonal_residual=None if residual is None else float(residual),
        diagonal_beta=None if beta is None else float(beta),
        fit_window=tuple(fit_window), slope=_gaussian_slope(r, log_values, fit_window),
        near_window=tuple(near_window), near_slope=_gaussian_slope(r, log_values, near_window),
        positive=positive, bound_holds=bound_holds,
        series_error=float(np.max(np.abs(series - values[near]))) if near.any() else 0.0,
        series_tail_bound=tail_bound)
