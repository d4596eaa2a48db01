from django.core.management.base import BaseCommand, CommandError

from core.harness.regularization import METHODS
from core.harness.suites import SUITES, run_suite, summarize_runs
from core.models import BenchmarkSuite
from core.numerics.exceptions import SparseRecoveryError
from core.tasks import run_benchmark_suite

from ._options import add_solver_arguments, config_from_options

RANGE_KEYS = ('n', 'm_ratio', 's_ratio', 'w', 'sigma', 'box', 'x0', 'method')
SOLVER_OPTIONS = ('lam', 'mu', 'tau', 'tau_fraction', 'max_iterations', 'rel_change_tol', 'objective_target')


class Command(BaseCommand):
    help = 'Run a benchmark suite and write one CSV row per run'

    def add_arguments(self, parser):
        parser.add_argument('suite', choices=sorted(SUITES))
        add_solver_arguments(parser)
        parser.add_argument('--output', help='Result CSV path')
        parser.add_argument('--reps', type=int, default=1, help='Repetitions (seeds) per configuration')
        parser.add_argument('--seed', type=int, default=0, help='Base seed')
        parser.add_argument('--threads', type=int, default=1, help='Worker threads for the runs')
        parser.add_argument('--n', nargs='+', type=int)
        parser.add_argument('--m-ratio', nargs='+', type=float)
        parser.add_argument('--s-ratio', nargs='+', type=float)
        parser.add_argument('--w', nargs='+', type=int)
        parser.add_argument('--sigma', nargs='+', type=float)
        parser.add_argument('--box', nargs='+', type=float, help='Box magnitudes')
        parser.add_argument('--x0', nargs='+')
        parser.add_argument('--method', nargs='+', choices=METHODS)
        parser.add_argument('--no-audit', action='store_true', help='Skip trace recording and audits')
        parser.add_argument('--queue', action='store_true', help='Store the suite and run it in a Celery worker')

    def handle(self, *args, **options):
        ranges = {key: options[key] for key in RANGE_KEYS if options.get(key)}

        if options['queue']:
            suite = BenchmarkSuite.objects.create(
                suite_name=options['suite'],
                parameters={
                    'ranges': ranges,
                    'solver': {key: options[key] for key in SOLVER_OPTIONS if options.get(key) is not None},
                    'threads': options['threads'],
                    'audit': not options['no_audit'],
                },
                repetitions=options['reps'],
                base_seed=options['seed'],
                auto_reg=options['auto_reg'],
            )
            run_benchmark_suite.delay(suite.id)
            self.stdout.write(self.style.SUCCESS(f'Suite {suite.id} queued'))
            return

        config = config_from_options(options, record_trace=False)
        try:
            records = run_suite(
                options['suite'],
                ranges=ranges,
                repetitions=options['reps'],
                output_path=options['output'],
                base_seed=options['seed'],
                threads=options['threads'],
                config=config,
                auto_reg=options['auto_reg'],
                audit=not options['no_audit'],
            )
        except (SparseRecoveryError, OSError) as e:
            raise CommandError(str(e))

        self.stdout.write('n\tm\ts\tw\tbox\tx0\tmethod\truns\tsuccess\tmean_err\tmean_iters\tmean_time_s')
        for row in summarize_runs(records):
            self.stdout.write(
                f"{row['n']}\t{row['m']}\t{row['s']}\t{row['w']}\t{row['box']}\t{row['x0']}\t{row['method']}\t"
                f"{row['runs']}\t{row['success_rate']:.2f}\t{row['mean_err']:.3e}\t{row['mean_iters']:.1f}\t"
                f"{row['mean_time_s']:.3f}"
            )
        if options['output']:
            self.stdout.write(self.style.SUCCESS(f"{len(records)} rows written to {options['output']}"))
