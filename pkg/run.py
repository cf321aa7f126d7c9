import argparse
import json
import logging
import os
import sys
import time
import warnings

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from ultrawigner import csv_io
from ultrawigner.decay import fit_envelope
from ultrawigner.errors import DataError, FitDegenerateError, TruncationWarning, UltraWignerError
from ultrawigner.hermite import analyze, gauss_hermite_rule, synthesize
from ultrawigner.phase_space import (ambiguity_of_coefficients, marginals, tilde_rescale,
                                     wigner_of_density)
from ultrawigner.states import pure_state_density
from ultrawigner.suites import (DEFAULT_SEED, DEFAULT_TOLERANCES, SUITES, CheckResult, SuiteContext,
                                report_dict, run_suites)
from ultrawigner.utils import SampledFunction, format_duration, parse_grid
from ultrawigner.weights import WeightFunction


CONFIG_FILE = './default.config.json'
N_MAX = 64
VERIFY_N_MAX = 200
COUNTEREXAMPLE_N_MAX = 400
FUNCTION_GRID = '-12:12:0.015625'
PHASE_GRID = '-8:8:0.03125'
AMBIGUITY_GRID = '-16:16:0.0625'
PERTURB_ENVELOPE = 1.0
THREADS = 1
DEFAULT_WEIGHT = {'family': 'power', 'lambda': 0.0625, 'beta': 1.0}
GRID_FLAGS = ('--grid', '--pgrid')
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def join_grid_values(argv):
    '''Rewrites `--grid -8:8:0.5` as `--grid=-8:8:0.5` so argparse does not read the value as a flag.'''
    out = []
    argv = list(argv)
    i = 0
    while i < len(argv):
        if argv[i] in GRID_FLAGS and i + 1 < len(argv):
            out.append(f'{argv[i]}={argv[i + 1]}')
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def load_config(path, required):
    if not os.path.isfile(path):
        if required:
            raise DataError(f'config file "{path}" does not exist')
        return {}
    with open(path, 'r') as config_file:
        try:
            return json.load(config_file)
        except json.JSONDecodeError as err:
            raise DataError(f'invalid config JSON: {err.msg}', line=err.lineno, source=path) from None


def get_arguments(argv=None):

    def check_bool(value):
        val = str(value).upper()
        if 'TRUE'.startswith(val):
            return True
        elif 'FALSE'.startswith(val):
            return False
        else:
            raise argparse.ArgumentTypeError('Argument is neither `True` nor `False`')

    def check_positive(value):
        val = int(value)
        if val < 1:
            raise argparse.ArgumentTypeError(f'{value} is not positive')
        return val

    def check_nonnegative(value):
        val = int(value)
        if val < 0:
            raise argparse.ArgumentTypeError(f'{value} is negative')
        return val

    def check_factor(value):
        val = float(value)
        if not val > 0:
            raise argparse.ArgumentTypeError(f'{value} is not a positive factor')
        return val

    argv = join_grid_values(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config_file', type=str, default=None)
    known, _ = pre.parse_known_args(argv)
    config = load_config(known.config_file or CONFIG_FILE, required=known.config_file is not None)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config_file',        type=str,            default=CONFIG_FILE,
                                                help='Path to the JSON config with tolerances and grid defaults')
    common.add_argument('--verbose',            type=check_bool,     default=False,
                                                help='Whether to log diagnostics at DEBUG level')
    common.add_argument('--threads',            type=check_positive, default=config.get('threads', THREADS),
                                                help='Maximum number of worker threads')
    common.add_argument('--json', '--report',   type=str,            dest='json',
                                                help='Path for the machine-readable JSON report')
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update({key[4:]: value for key, value in config.items() if key.startswith('tol_')})
    for name, value in tolerances.items():
        common.add_argument(f'--tol-{name.replace("_", "-")}', type=float, default=value, dest=f'tol_{name}',
                            help=f'Tolerance "{name}" (default {value:g})')

    parser = argparse.ArgumentParser(description='Hermite expansions, Wigner distributions and weighted decay checks')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', parents=[common], help='Hermite coefficients of sampled data')
    p.add_argument('--input',                   type=str,            required=True, help='Samples CSV (x,re,im)')
    p.add_argument('--output',                  type=str,            required=True, help='Coefficient CSV to write')
    p.add_argument('--nmax',                    type=check_nonnegative, default=N_MAX, help='Truncation order N')
    p.add_argument('--order',                   type=check_positive, help='Quadrature order (default 2(N+1))')

    p = sub.add_parser('synthesize', parents=[common], help='Evaluate a Hermite series')
    p.add_argument('--input',                   type=str,            required=True, help='Coefficient CSV (n,re,im)')
    p.add_argument('--output',                  type=str,            required=True, help='Samples CSV to write')
    p.add_argument('--grid',                    type=parse_grid,     default=config.get('function_grid', FUNCTION_GRID),
                                                help='Evaluation grid lo:hi:step')
    p.add_argument('--nodes',                   type=check_positive, help='Evaluate on the nodes of the Gauss-Hermite rule of this order instead')

    for name, helptext in (('wigner', 'Wigner distribution of a density matrix or pure state'),
                           ('ambiguity', 'Ambiguity function of a pure state')):
        p = sub.add_parser(name, parents=[common], help=helptext)
        source = p.add_mutually_exclusive_group(required=True)
        if name == 'wigner':
            source.add_argument('--density',    type=str,            help='Density CSV (m,n,re,im)')
        source.add_argument('--coefficients',   type=str,            help='Coefficient CSV of a pure state')
        default_grid = config.get('phase_grid', PHASE_GRID) if name == 'wigner' else \
            config.get('ambiguity_grid', AMBIGUITY_GRID)
        p.add_argument('--grid',                type=parse_grid,     default=default_grid, help='q (or theta) grid lo:hi:step')
        p.add_argument('--pgrid',               type=parse_grid,     help='p (or varpi) grid; defaults to --grid')
        p.add_argument('--output',              type=str,            required=True, help='Phase-space CSV to write')
        if name == 'wigner':
            p.add_argument('--tilde',           type=check_bool,     default=False,
                                                help='Write the rescaled (tilde) convention')

    p = sub.add_parser('marginals', parents=[common], help='Marginals of a phase-space CSV')
    p.add_argument('--input',                   type=str,            required=True, help='Phase-space CSV')
    p.add_argument('--output',                  type=str,            required=True, help='Marginals CSV to write')

    p = sub.add_parser('envelope', parents=[common], help='Fit C exp(-lambda n^(beta/2)) to coefficient magnitudes')
    p.add_argument('--coefficients',            type=str,            required=True, help='Coefficient CSV')

    p = sub.add_parser('verify', parents=[common], help='Run verification suites')
    p.add_argument('--suite',                   type=str,            nargs='+', default=['all'],
                                                choices=['all'] + list(SUITES), help='Suites to run')
    p.add_argument('--nmax',                    type=check_nonnegative, default=VERIFY_N_MAX, help='Largest index checked')
    p.add_argument('--seed',                    type=int,            default=config.get('seed', DEFAULT_SEED),
                                                help='Seed for random states and points')
    p.add_argument('--perturb-envelope',        type=check_factor,   default=PERTURB_ENVELOPE, dest='perturb_envelope',
                                                help='Scale the Hermite tail and radial envelopes; a factor well below 1 (e.g. 0.1) injects a violation')
    p.add_argument('--weight',                  type=str,            help='Weight JSON, inline or a path')

    p = sub.add_parser('counterexample', parents=[common], help='Diagonal counterexample: algebraic coefficients, Gaussian Wigner function')
    p.add_argument('--nmax',                    type=check_nonnegative, default=COUNTEREXAMPLE_N_MAX, help='Truncation order N (>= 64)')

    args = parser.parse_args(argv)
    args.config = config
    args.tolerances = {name: getattr(args, f'tol_{name}') for name in tolerances}
    return args


def _resample(samples, nodes):
    '''Samples at the quadrature nodes; zero outside the sampled range.'''
    if samples.x.size == nodes.size and np.allclose(samples.x, nodes, rtol=0, atol=1e-12):
        return samples.values
    edge = max(abs(samples.values[0]), abs(samples.values[-1]))
    outside = (nodes < samples.x[0]) | (nodes > samples.x[-1])
    if np.any(outside) and edge > 1e-14:
        warnings.warn(f'Quadrature nodes reach beyond the samples, where |f| = {edge:.3g} has not decayed',
                      TruncationWarning)
    re = CubicSpline(samples.x, samples.values.real, extrapolate=False)(nodes)
    im = CubicSpline(samples.x, samples.values.imag, extrapolate=False)(nodes)
    return np.where(outside, 0.0, re + 1j * im)


def cmd_analyze(args):
    samples = csv_io.read_samples(args.input)
    rule = gauss_hermite_rule(args.order or 2 * (args.nmax + 1))
    values = _resample(samples, rule.nodes)
    alpha = analyze(lambda x: values, args.nmax, rule)
    csv_io.write_coefficients(args.output, alpha)
    print(f'Wrote {len(alpha)} coefficients to {args.output} (order {rule.order} rule, l2 norm {alpha.l2_norm():.6g})')
    return [CheckResult('analyze', 'pass', {'n_max': alpha.n_max, 'order': rule.order, 'l2_norm': alpha.l2_norm()},
                        {'output': args.output})]


def cmd_synthesize(args):
    alpha = csv_io.read_coefficients(args.input)
    x = gauss_hermite_rule(args.nodes).nodes if args.nodes else args.grid
    samples = SampledFunction(x, synthesize(alpha, x))
    csv_io.write_samples(args.output, samples)
    print(f'Wrote {len(samples)} samples to {args.output}')
    return [CheckResult('synthesize', 'pass', {'n_max': alpha.n_max, 'points': len(samples)}, {'output': args.output})]


def cmd_wigner(args):
    if args.density:
        rho = csv_io.read_density(args.density)
    else:
        rho = pure_state_density(csv_io.read_coefficients(args.coefficients))
    p_axis = args.grid if args.pgrid is None else args.pgrid
    grid = wigner_of_density(rho, args.grid, p_axis, threads=args.threads)
    if args.tilde:
        grid = tilde_rescale(grid)
    csv_io.write_phase_space(args.output, grid)
    print(f'Wrote {grid.values.size} Wigner values ({grid.convention}) to {args.output}, '
          f'imaginary residue {grid.imag_residue:.3g}')
    return [CheckResult('wigner', 'pass', {'n_max': rho.n_max, 'imag_residue': grid.imag_residue},
                        {'output': args.output, 'convention': grid.convention})]


def cmd_ambiguity(args):
    alpha = csv_io.read_coefficients(args.coefficients)
    varpi = args.grid if args.pgrid is None else args.pgrid
    grid = ambiguity_of_coefficients(alpha, args.grid, varpi, threads=args.threads)
    csv_io.write_phase_space(args.output, grid)
    print(f'Wrote {grid.values.size} ambiguity values to {args.output}')
    return [CheckResult('ambiguity', 'pass', {'n_max': alpha.n_max}, {'output': args.output})]


def cmd_marginals(args):
    grid = csv_io.read_phase_space(args.input)
    q_marginal, p_marginal = marginals(grid)
    csv_io.write_marginals(args.output, grid, q_marginal, p_marginal)
    mass = float(trapezoid(q_marginal, grid.q_axis))
    print(f'Wrote q and p marginals to {args.output} (total mass {mass:.10g})')
    return [CheckResult('marginals', 'pass', {'mass': mass}, {'output': args.output})]


def cmd_envelope(args):
    alpha = csv_io.read_coefficients(args.coefficients)
    config = args.config
    try:
        envelope = fit_envelope(alpha, floor=config.get('envelope_floor', 1e-12),
                                min_index=config.get('envelope_min_index', 4),
                                min_support=config.get('envelope_min_support', 8),
                                max_residual=args.tolerances['fit_residual'])
    except FitDegenerateError as err:
        print(f'Envelope fit is degenerate: {err}')
        return [CheckResult('envelope', 'degenerate', {'residual': err.residual, 'beta_hat': err.beta_hat}, {})]
    print(f'|alpha_n| ~ {envelope.c_hat:.6g} exp(-{envelope.lambda_hat:.6g} n^({envelope.beta_hat:.6g}/2)), '
          f'residual {envelope.residual:.3g}')
    return [CheckResult('envelope', 'pass', envelope.to_dict(), {})]


def _suite_context(args, n_max):
    weight_arg = getattr(args, 'weight', None)
    if weight_arg:
        weight = csv_io.load_weight(weight_arg)
    else:
        weight = WeightFunction.from_json(args.config.get('default_weight', DEFAULT_WEIGHT))
    return SuiteContext(n_max=n_max, tolerances=args.tolerances,
                        seed=getattr(args, 'seed', args.config.get('seed', DEFAULT_SEED)),
                        perturb=getattr(args, 'perturb_envelope', PERTURB_ENVELOPE), threads=args.threads,
                        weight=weight, cbar_grid=tuple(args.config.get('cbar_grid', SuiteContext.cbar_grid)))


def cmd_verify(args):
    names = list(SUITES) if 'all' in args.suite else list(dict.fromkeys(args.suite))
    return run_suites(names, _suite_context(args, args.nmax))


def cmd_counterexample(args):
    return run_suites(['counterexample'], _suite_context(args, args.nmax))


COMMANDS = {
    'analyze': cmd_analyze,
    'synthesize': cmd_synthesize,
    'wigner': cmd_wigner,
    'ambiguity': cmd_ambiguity,
    'marginals': cmd_marginals,
    'envelope': cmd_envelope,
    'verify': cmd_verify,
    'counterexample': cmd_counterexample,
}


def main(argv=None):
    try:
        args = get_arguments(argv)
    except UltraWignerError as err:
        print(f'error: {err}', file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    start = time.time()
    try:
        results = COMMANDS[args.command](args)
        report = report_dict(args.command, results)
        if args.json:
            csv_io.write_report(args.json, report)
    except (UltraWignerError, OSError) as err:
        print(f'error: {err}', file=sys.stderr)
        return EXIT_USAGE
    failed = [r.name for r in results if r.verdict == 'fail']
    print(f'{args.command}: {report["verdict"]} ({format_duration(time.time() - start)})')
    if failed:
        print(f'Failed checks: {", ".join(failed)}')
        return EXIT_FAILED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
