import numpy as np
from django.core.management.base import BaseCommand, CommandError

from core.harness.formats import format_float, read_vector
from core.numerics.exceptions import SparseRecoveryError
from core.numerics.model import BoxConstraint, GroupPartition, RegularizationParams
from core.numerics.oracle import MAX_PROX_DIMENSION, brute_force_prox
from core.numerics.prox import prox_objective, prox_sparse_group

from ._options import add_box_arguments, box_from_options


class Command(BaseCommand):
    help = 'Evaluate the sparse-group prox of a vector read from a file'

    def add_arguments(self, parser):
        parser.add_argument('vector', help='Input vector s (.npy or text)')
        parser.add_argument('--lambda', dest='lam', type=float, default=0.0)
        parser.add_argument('--mu', type=float, default=0.0)
        parser.add_argument('--tau', type=float, default=1.0)
        parser.add_argument('--w', type=int, default=1, help='Width of contiguous groups')
        add_box_arguments(parser)
        parser.add_argument('--check', action='store_true', help='Compare with the brute-force minimum')

    def handle(self, *args, **options):
        try:
            s = read_vector(options['vector'])
            params = RegularizationParams(options['lam'], options['mu'], options['tau'])
            partition = GroupPartition.contiguous(s.size, options['w'])
            box = box_from_options(options, s.size) or BoxConstraint.symmetric(s.size, np.inf)
            x = prox_sparse_group(s, params, box, partition)
            psi = prox_objective(x, s, params, box, partition)
        except SparseRecoveryError as e:
            raise CommandError(str(e))

        self.stdout.write(' '.join(format_float(v) for v in x))
        self.stdout.write(f'psi {format_float(psi)}')

        if options['check']:
            if s.size > MAX_PROX_DIMENSION:
                raise CommandError(f'--check needs n <= {MAX_PROX_DIMENSION}, got {s.size}')
            _, best = brute_force_prox(s, params, box, partition)
            self.stdout.write(f'oracle psi {format_float(best)}')
            if abs(best - psi) > 1e-10:
                raise CommandError(f'Prox value {psi!r} differs from the oracle minimum {best!r}')
