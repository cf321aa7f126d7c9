from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DataError


DIVERGENCE_BAND = 0.05
# Relative margin a boundary value must exceed the interior supremum by.
DIVERGENCE_RTOL = 1e-9
MAX_GRID_POINTS = 1_000_000


@dataclass(frozen=True)
class SampledFunction:
    '''Complex samples of a function of one real variable.'''
    x: np.ndarray
    values: np.ndarray
    warnings: tuple = field(default=())

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or values.shape != x.shape:
            raise ArgumentError(f'Sample grid of shape {x.shape} does not match values of shape {values.shape}')
        x.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'warnings', tuple(self.warnings))

    def __len__(self):
        return len(self.x)


def check_finite(values, what='values'):
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        bad = np.flatnonzero(~np.isfinite(values.ravel()))[0]
        raise DataError(f'{what} contain a non-finite entry at flat index {bad}')
    return values


def symmetric_grid(extent, step):
    '''Uniform grid on [-extent, extent] containing 0.'''
    if extent <= 0 or step <= 0:
        raise ArgumentError(f'Grid extent and step must be positive, got {extent} and {step}')
    k = int(round(extent / step))
    if 2 * k + 1 > MAX_GRID_POINTS:
        raise ArgumentError(f'Grid with {2 * k + 1} points exceeds {MAX_GRID_POINTS}')
    return step * np.arange(-k, k + 1, dtype=float)


def parse_grid(text):
    '''Parses `lo:hi:step` into an inclusive uniform grid.'''
    try:
        lo, hi, step = (float(part) for part in str(text).split(':'))
    except ValueError:
        raise ArgumentError(f'Grid "{text}" is not of the form lo:hi:step') from None
    if not (np.isfinite(lo) and np.isfinite(hi) and np.isfinite(step)) or step <= 0 or hi <= lo:
        raise ArgumentError(f'Grid "{text}" needs lo < hi and step > 0')
    count = int(round((hi - lo) / step))
    if count + 1 > MAX_GRID_POINTS:
        raise ArgumentError(f'Grid "{text}" has more than {MAX_GRID_POINTS} points')
    return lo + step * np.arange(count + 1, dtype=float)


def is_uniform_symmetric(x, rtol=1e-9):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 3:
        return False
    steps = np.diff(x)
    scale = max(1.0, float(np.max(np.abs(x))))
    return bool(np.all(steps > 0)
                and np.allclose(steps, steps[0], rtol=rtol, atol=rtol * scale)
                and np.allclose(x, -x[::-1], rtol=0, atol=rtol * scale))


def band_mask(size, frac=DIVERGENCE_BAND, both_ends=True):
    '''Marks the outermost `frac` of an index range.'''
    width = max(1, int(np.ceil(frac * size)))
    mask = np.zeros(size, dtype=bool)
    mask[size - width:] = True
    if both_ends:
        mask[:width] = True
    return mask


def attained_in_band(log_values, mask, rtol=DIVERGENCE_RTOL):
    '''True when the supremum over the band beats the interior supremum.'''
    log_values = np.asarray(log_values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    inner, outer = log_values[~mask], log_values[mask]
    if inner.size == 0 or outer.size == 0:
        return False
    outer_max = np.max(outer)
    if outer_max == -np.inf:
        return False
    return bool(outer_max > np.max(inner) + np.log1p(rtol))


def log_abs(values):
    with np.errstate(divide='ignore'):
        return np.log(np.abs(values))


def json_float(value):
    '''None for inf and nan, which JSON cannot carry.'''
    return float(value) if np.isfinite(value) else None


def format_duration(secs):
    mins = int(secs // 60)
    hrs = int(mins // 60)
    sec_str = f'{int(secs) % 60}' if float(secs).is_integer() else f'{secs % 60:.3f}'
    if hrs > 0:
        return f'{hrs} hrs {mins % 60} min {sec_str} sec'
    elif mins > 0:
        return f'{mins} min {sec_str} sec'
    else:
        return f'{sec_str} seconds'
