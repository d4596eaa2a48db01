"""
Flags shared by the solve, bench and prox commands.
"""
from django.core.management.base import CommandError

from core.config import solver_config
from core.harness.formats import read_box_file
from core.numerics.exceptions import SparseRecoveryError
from core.numerics.model import BoxConstraint


def add_solver_arguments(parser):
    parser.add_argument('--lambda', dest='lam', type=float, help='Element penalty weight')
    parser.add_argument('--mu', type=float, help='Group penalty weight')
    tau = parser.add_mutually_exclusive_group()
    tau.add_argument('--tau', type=float, help='Explicit step size')
    tau.add_argument('--tau-frac', dest='tau_fraction', type=float, help='Step size as a fraction of 1/L')
    parser.add_argument('--max-iter', dest='max_iterations', type=int, help='Iteration cap')
    parser.add_argument('--rel-tol', dest='rel_change_tol', type=float, help='Relative change tolerance')
    parser.add_argument('--eps-target', dest='objective_target', type=float, help='Stop once f(x) <= target')
    parser.add_argument('--auto-reg', action='store_true', help='Tune lambda and mu by grid search')


def add_box_arguments(parser):
    box = parser.add_mutually_exclusive_group()
    box.add_argument('--box', dest='box_magnitude', type=float, help='Symmetric box magnitude')
    box.add_argument('--box-file', help='Two-column l u text file or .npz with l and u')


def config_from_options(options, record_trace=True):
    try:
        return solver_config(options, record_trace=record_trace)
    except SparseRecoveryError as e:
        raise CommandError(str(e))


def box_from_options(options, n):
    """Box from --box or --box-file, or None when neither was given."""
    try:
        if options.get('box_file'):
            box = read_box_file(options['box_file'])
            if box.n != n:
                raise CommandError(f"Box file has {box.n} coordinates, instance has {n}")
            return box
        if options.get('box_magnitude') is not None:
            return BoxConstraint.symmetric(n, options['box_magnitude'])
    except SparseRecoveryError as e:
        raise CommandError(str(e))
    return None
