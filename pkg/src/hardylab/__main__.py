import argparse
import logging
import sys

import hardylab
import hardylab.components
import hardylab.framework.run
import hardylab.parameters
from hardylab.bases import Family
from hardylab.commands.estimates import Estimates
from hardylab.framework.config_check import ConfigError
from hardylab.framework.errors import CheckFailed, Error
from hardylab.framework.store import ResultsStore
from hardylab.sharpness import Route

logger = logging.getLogger('hardylab')


def _add_system_args(parser):
    parser.add_argument('--system', help='Orthonormal family.', choices=[family.value for family in Family])
    parser.add_argument('--alpha', help='Type parameter alpha; one value, or one per coordinate separated by commas.')
    parser.add_argument('--beta', help='Jacobi parameter beta.')
    parser.add_argument('--lam', help='Generalized Hermite parameter lambda.')
    parser.add_argument('--d', type=int, help='Dimension.')


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog=hardylab.__name__, allow_abbrev=False)
    parser.add_argument('--verbose', action='store_true')
    parser.add_argument('--config', help='Flat YAML file with numerical settings.', metavar='FILE')
    parser.add_argument('--store', help='JSON-lines results store (default: $HARDYLAB_STORE).', metavar='PATH')
    parser.add_argument('--format', choices=['csv', 'json'], help='Output format (default csv).')
    parser.add_argument('--out', help='Output file; default is standard output.', metavar='PATH')
    parser.add_argument('--threads', type=int, help='Worker threads.')
    parser.add_argument('--log-dir', help='Write a log file to this directory.', metavar='DIR')
    parser.add_argument('--abs-tol', type=float, help='Absolute quadrature tolerance.')
    parser.add_argument('--rel-tol', type=float, help='Relative quadrature tolerance.')
    parser.add_argument('--panel-budget', type=int, help='Maximum number of quadrature panels.')
    parser.add_argument('--spectral-tol', type=float, help='Tail bound for spectral sums.')
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    basis = commands.add_parser('basis', help='Evaluate basis functions or their derivatives.')
    _add_system_args(basis)
    basis.add_argument('--k', type=int, help='Index k.')
    basis.add_argument('--u', help='Comma separated evaluation points.')
    basis.add_argument('--points', help='File with evaluation points.', metavar='FILE')
    basis.add_argument('--deriv', type=int, help='Derivative order.')

    kernel = commands.add_parser('kernel', help='Evaluate kernels and kernel derivative norms.')
    kernel.add_argument('action', choices=['closed', 'spectral', 'heat', 'deriv-l2'])
    _add_system_args(kernel)
    kernel.add_argument('--r', type=float, help='Kernel parameter r in (0, 1).')
    kernel.add_argument('--t', type=float, help='Heat kernel time t > 0.')
    kernel.add_argument('--u', help='Comma separated first arguments.')
    kernel.add_argument('--v', help='Comma separated second arguments.')
    kernel.add_argument('--points', help='File with first arguments.', metavar='FILE')
    kernel.add_argument('--j', type=int, help='Derivative order.')
    kernel.add_argument('--method', choices=['fd', 'spectral'])
    kernel.add_argument('--kmax', type=int, help='Spectral cutoff.')

    atom = commands.add_parser('atom', help='Build and check counterexample atoms.')
    atom.add_argument('action', choices=['build', 'validate', 'constants', 'scaling'])
    atom.add_argument('--p', help='Hardy space exponent, e.g. 2/3.')
    atom.add_argument('--A', type=float, help='Dilation A >= 1.')
    atom.add_argument('--delta', help='Piece width, e.g. 1/10.')
    atom.add_argument('--deltas', help='Comma separated grid of delta.')
    atom.add_argument('--q', choices=['2', 'inf'])
    atom.add_argument('--atom', help='JSON atom file.', metavar='FILE')
    atom.add_argument('--d', type=int, help='Dimension of the product atom.')

    hardy = commands.add_parser('hardy', help='Exponents and Hardy sums.')
    hardy.add_argument('action', choices=['gamma', 'exponent', 'sum'])
    _add_system_args(hardy)
    hardy.add_argument('--p', help='Hardy space exponent.')
    hardy.add_argument('--s', help='Power of the coefficients.')
    hardy.add_argument('--E', help='Exponent; default is the admissible exponent.')
    hardy.add_argument('--A', type=float, help='Dilation of the counterexample atom.')
    hardy.add_argument('--delta', help='Piece width of the counterexample atom.')
    hardy.add_argument('--atom', help='JSON atom file.', metavar='FILE')
    hardy.add_argument('--kmax', type=int, help='Largest shell summed explicitly.')

    sharpness = commands.add_parser('sharpness', help='Sharpness experiments.')
    sharpness.add_argument('action', choices=['params', 'run'])
    _add_system_args(sharpness)
    sharpness.add_argument('--p', help='Hardy space exponent.')
    sharpness.add_argument('--s', help='Power of the coefficients.')
    sharpness.add_argument('--eps', help='Exponent deficit epsilon; default 1/5, or 0 on the boundary route.')
    sharpness.add_argument('--kgrid', help='Comma separated grid of K.')
    sharpness.add_argument('--delta', help='Piece width of the atom.')
    sharpness.add_argument('--route', choices=[route.value for route in Route])
    sharpness.add_argument('--k-cap-factor', type=int, help='Coefficients are computed up to this multiple of K.')
    sharpness.add_argument('--no-delta-check', dest='delta_check', action='store_const', const=0,
                           help='Skip the repeated fit at delta/2.')

    estimates = commands.add_parser('estimates', help='Numerical checks of the estimates.')
    estimates.add_argument('action', choices=['regime', 'sign-size', 'deriv-sup', 'holder', 'kernel-holder',
                                              'cond-c'])
    _add_system_args(estimates)
    estimates.add_argument('--j', type=int, help='Derivative order.')
    estimates.add_argument('--ell', type=int, help='Weight exponent of the sign-size check.')
    estimates.add_argument('--k', type=int, help='Taylor order of condition (C).')
    estimates.add_argument('--kgrid', help='Comma separated grid of k.')
    estimates.add_argument('--rgrid', help='Comma separated grid of r.')
    estimates.add_argument('--cgrid', help='Comma separated candidate constants c.')
    estimates.add_argument('--u', help='Comma separated sample points.')
    estimates.add_argument('--pairs', help='File with one pair of points per line.', metavar='FILE')
    estimates.add_argument('--method', choices=['parseval', 'quadrature'])

    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    hardylab.framework.run.set_up_console_logging(logger, args.verbose)
    try:
        # Defaults, then the configuration file, then 'not None' command line arguments.
        config = dict(hardylab.parameters.defaults)
        if args.config:
            config.update(hardylab.parameters.read(args.config))
        config.update({key: val for key, val in vars(args).items() if val is not None})
        if not config.get('store'):
            store = ResultsStore.from_environment()
            config['store'] = store.path if store is not None else None
        config.setdefault('format', 'csv')

        run = hardylab.components.make_run(config)
        record = run.start()
        text = hardylab.framework.run.write_output(record.outputs, config['format'], config.get('out'))
        if not config.get('out'):
            sys.stdout.write(text)
        if record.command == Estimates.component and not record.outputs.get('passed', True):
            logger.error('Check %s did not pass.', record.outputs.get('name'))
            return CheckFailed.exit_code
    except ConfigError as e:
        logger.error('hardylab configuration error: %s Check configuration key %s.',
                     e.message, ': '.join(str(x) for x in e.path))
        return e.exit_code
    except Error as e:
        logger.error('hardylab error: %s', e.message)
        return e.exit_code
    finally:
        hardylab.framework.run.remove_logfile_handler(logger)
    return 0


if __name__ == '__main__':
    sys.exit(main())
