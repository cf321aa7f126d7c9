'''Readers and writers for the coefficient, sample, density and phase-space CSV formats.'''
import csv
import json
import logging
import os

import numpy as np

from .errors import ConventionError, DataError
from .hermite import CoefficientSequence
from .phase_space import PLAIN, TILDE, PhaseSpaceGrid
from .states import EXPLICIT, HERMITIAN_TOL, DensityMatrix
from .utils import SampledFunction
from .weights import WeightFunction


logger = logging.getLogger(__name__)

COEFFICIENT_HEADER = ('n', 're', 'im')
SAMPLE_HEADER = ('x', 're', 'im')
DENSITY_HEADER = ('m', 'n', 're', 'im')
PHASE_SPACE_HEADER = ('q', 'p', 're', 'im')
MARGINAL_HEADER = ('axis', 'coordinate', 'value')
CONVENTION_TAG = '# convention='


def _fmt(value):
    return format(float(value), '.17g')


def _rows(path, header):
    '''Returns (comment lines, data rows), each tagged with its line number.'''
    comments = []
    rows = []
    with open(path, newline='') as f:
        seen_header = False
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or not ''.join(row).strip():
                continue
            if row[0].lstrip().startswith('#'):
                comments.append((line_no, ','.join(row).strip()))
                continue
            row = [field.strip() for field in row]
            if not seen_header:
                if tuple(row) != header:
                    raise DataError(f'expected header "{",".join(header)}", got "{",".join(row)}"',
                                    line=line_no, source=path)
                seen_header = True
                continue
            if len(row) != len(header):
                raise DataError(f'expected {len(header)} fields, got {len(row)}', line=line_no, source=path)
            rows.append((line_no, row))
    if not seen_header:
        raise DataError(f'missing header "{",".join(header)}"', source=path)
    return comments, rows


def _number(text, line_no, path, integer=False):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f'"{text}" is not a number', line=line_no, source=path) from None
    if not np.isfinite(value):
        raise DataError(f'non-finite value "{text}"', line=line_no, source=path)
    if integer:
        if value != int(value) or value < 0:
            raise DataError(f'index "{text}" is not a nonnegative integer', line=line_no, source=path)
        return int(value)
    return value


def _writer(path):
    f = open(path, 'w', newline='')
    return f, csv.writer(f, lineterminator='\n')


def read_coefficients(path):
    _, rows = _rows(path, COEFFICIENT_HEADER)
    values = {}
    for line_no, (n, re, im) in rows:
        n = _number(n, line_no, path, integer=True)
        if n in values:
            raise DataError(f'duplicate index n={n}', line=line_no, source=path)
        values[n] = complex(_number(re, line_no, path), _number(im, line_no, path))
    if not values:
        raise DataError('no coefficients', source=path)
    out = np.zeros(max(values) + 1, dtype=complex)
    for n, v in values.items():
        out[n] = v
    return CoefficientSequence(out)


def write_coefficients(path, alpha):
    f, writer = _writer(path)
    with f:
        writer.writerow(COEFFICIENT_HEADER)
        for n, v in enumerate(alpha.values):
            writer.writerow((n, _fmt(v.real), _fmt(v.imag)))


def read_samples(path):
    _, rows = _rows(path, SAMPLE_HEADER)
    if len(rows) < 2:
        raise DataError('at least two samples are needed', source=path)
    x = np.empty(len(rows))
    values = np.empty(len(rows), dtype=complex)
    for i, (line_no, (xs, re, im)) in enumerate(rows):
        x[i] = _number(xs, line_no, path)
        if i and x[i] <= x[i - 1]:
            raise DataError('x must be strictly increasing', line=line_no, source=path)
        values[i] = complex(_number(re, line_no, path), _number(im, line_no, path))
    return SampledFunction(x, values)


def write_samples(path, samples):
    f, writer = _writer(path)
    with f:
        writer.writerow(SAMPLE_HEADER)
        for x, v in zip(samples.x, samples.values):
            writer.writerow((_fmt(x), _fmt(v.real), _fmt(v.imag)))


def read_density(path, tol=HERMITIAN_TOL):
    '''Unlisted entries are zero; a listed (m,n) without (n,m) is completed by conjugation.'''
    _, rows = _rows(path, DENSITY_HEADER)
    listed = {}
    for line_no, (m, n, re, im) in rows:
        key = (_number(m, line_no, path, integer=True), _number(n, line_no, path, integer=True))
        if key in listed:
            raise DataError(f'duplicate entry (m, n) = {key}', line=line_no, source=path)
        value = complex(_number(re, line_no, path), _number(im, line_no, path))
        mirror = listed.get(key[::-1])
        if mirror is not None and abs(mirror[0].conjugate() - value) > tol:
            raise DataError(f'entry {key} conflicts with the Hermitian mirror listed on line {mirror[1]}',
                            line=line_no, source=path)
        listed[key] = (value, line_no)
    if not listed:
        raise DataError('no density entries', source=path)
    size = max(max(key) for key in listed) + 1
    entries = np.zeros((size, size), dtype=complex)
    for (m, n), (value, _) in listed.items():
        entries[m, n] = value
        if (n, m) not in listed:
            entries[n, m] = value.conjugate()
    logger.debug('Read %d density entries from %s (N=%d)', len(listed), path, size - 1)
    return DensityMatrix(entries, EXPLICIT)


def write_density(path, rho):
    f, writer = _writer(path)
    with f:
        writer.writerow(DENSITY_HEADER)
        for (m, n), v in np.ndenumerate(rho.entries):
            if v != 0:
                writer.writerow((m, n, _fmt(v.real), _fmt(v.imag)))


def read_phase_space(path):
    comments, rows = _rows(path, PHASE_SPACE_HEADER)
    convention = PLAIN
    for _, text in comments:
        if text.startswith(CONVENTION_TAG):
            convention = text[len(CONVENTION_TAG):].strip()
    if convention not in (PLAIN, TILDE):
        raise ConventionError(f'{path}: unknown convention "{convention}"')
    data = np.array([[_number(v, line_no, path) for v in row] for line_no, row in rows])
    if data.size == 0:
        raise DataError('no phase-space samples', source=path)
    q_axis = np.unique(data[:, 0])
    p_axis = np.unique(data[:, 1])
    if data.shape[0] != q_axis.size * p_axis.size:
        raise DataError(f'{data.shape[0]} rows do not form a {q_axis.size}x{p_axis.size} grid', source=path)
    q_mesh, p_mesh = np.meshgrid(q_axis, p_axis, indexing='ij')
    mismatch = np.flatnonzero((data[:, 0] != q_mesh.ravel()) | (data[:, 1] != p_mesh.ravel()))
    if mismatch.size:
        raise DataError('rows are not row-major over (q, p)', line=rows[mismatch[0]][0], source=path)
    values = (data[:, 2] + 1j * data[:, 3]).reshape(q_axis.size, p_axis.size)
    return PhaseSpaceGrid(q_axis, p_axis, values, convention)


def write_phase_space(path, grid):
    f, writer = _writer(path)
    with f:
        f.write(f'{CONVENTION_TAG}{grid.convention}\n')
        writer.writerow(PHASE_SPACE_HEADER)
        for i, q in enumerate(grid.q_axis):
            for j, p in enumerate(grid.p_axis):
                v = grid.values[i, j]
                writer.writerow((_fmt(q), _fmt(p), _fmt(v.real), _fmt(v.imag)))


def write_marginals(path, grid, q_marginal, p_marginal):
    f, writer = _writer(path)
    with f:
        writer.writerow(MARGINAL_HEADER)
        for axis, coords, values in (('q', grid.q_axis, q_marginal), ('p', grid.p_axis, p_marginal)):
            for c, v in zip(coords, values):
                writer.writerow((axis, _fmt(c), _fmt(v)))


def load_weight(arg):
    '''A weight given as inline JSON or as the path of a JSON file.'''
    text = str(arg).strip()
    source = None
    if not text.startswith('{'):
        if not os.path.isfile(text):
            raise DataError(f'weight "{text}" is neither inline JSON nor an existing file')
        source = text
        with open(text) as f:
            text = f.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise DataError(f'invalid weight JSON: {err.msg}', line=err.lineno, source=source) from None
    return WeightFunction.from_json(obj)


def write_report(path, report):
    with open(path, 'w') as f:
        json.dump(report, f, indent=2, sort_keys=False)
        f.write('\n')
