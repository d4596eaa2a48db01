from dataclasses import replace

from django.core.management.base import BaseCommand, CommandError

from core.harness.formats import read_instance, write_results, write_results_csv, write_trace_csv
from core.harness.regularization import METHODS, tune_regularization
from core.harness.suites import initial_point, run_instance
from core.numerics.exceptions import SparseRecoveryError

from ._options import add_box_arguments, add_solver_arguments, box_from_options, config_from_options


class Command(BaseCommand):
    help = 'Solve an instance file and print (or append) its result row'

    def add_arguments(self, parser):
        parser.add_argument('instance', help='Instance file written by gen')
        add_solver_arguments(parser)
        add_box_arguments(parser)
        parser.add_argument('--x0', default='zeros', help='zeros, ones, neg-ones, randn or file:PATH')
        parser.add_argument('--method', choices=METHODS, default='sgb')
        parser.add_argument('--seed', type=int, help='Seed for a randn start (default: the instance seed)')
        parser.add_argument('--sigma', type=float, help='Noise level to report (instance files do not store it)')
        parser.add_argument('--trace', help='Write the per-iteration trace CSV here')
        parser.add_argument('--output', help='Append the result row to this CSV instead of printing it')
        parser.add_argument('--audit', action='store_true', help='Print the convergence audits')

    def handle(self, *args, **options):
        config = config_from_options(options)
        try:
            instance = read_instance(options['instance'], sigma=options['sigma'] if options['sigma'] is not None else float('nan'))
            box = box_from_options(options, instance.n)
            if box:
                instance = replace(instance, box=box)
            x0_seed = instance.seed if options['seed'] is None else options['seed']
            if options['auto_reg']:
                # no pilot seed for a stored instance; the grid is searched on the instance itself
                tuned = tune_regularization(
                    instance,
                    config,
                    x0=initial_point(options['x0'], instance.n, x0_seed),
                    method=options['method'],
                )
                config = replace(config, lam=tuned.lam, mu=tuned.mu)
            record = run_instance(
                instance,
                config,
                x0=options['x0'],
                method=options['method'],
                audit=True,
                x0_seed=x0_seed,
            )
            if options['trace']:
                write_trace_csv(options['trace'], record.trace)
            if options['output']:
                write_results_csv(options['output'], [record], append=True)
        except (SparseRecoveryError, OSError) as e:
            raise CommandError(str(e))

        if not options['output']:
            write_results(self.stdout, [record])
        for warning in record.warnings:
            self.stderr.write(self.style.WARNING(warning))
        if options['audit']:
            self.stdout.write(
                f'sufficient decrease: {record.decrease_ok}\n'
                f'support audit: {record.support_audit_passed}\n'
                f'tau-stationary: {record.stationary}\n'
                f'SO point: {record.so_point}'
            )
