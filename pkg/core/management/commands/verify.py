from django.core.management.base import BaseCommand, CommandError

from core.harness.verification import run_all


class Command(BaseCommand):
    help = 'Cross-check the prox and the solver against brute-force oracles on small random instances'

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--prox-trials', type=int, default=1000)
        parser.add_argument('--reduction-trials', type=int, default=500)
        parser.add_argument('--chain-trials', type=int, default=50)

    def handle(self, *args, **options):
        results = run_all(
            seed=options['seed'],
            prox_trials=options['prox_trials'],
            reduction_trials=options['reduction_trials'],
            chain_trials=options['chain_trials'],
        )
        for result in results:
            if result.passed:
                self.stdout.write(self.style.SUCCESS(str(result)))
            else:
                self.stdout.write(self.style.ERROR(str(result)))
                for failure in result.failures[:5]:
                    self.stdout.write(f'  {failure}')

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise CommandError(f"Verification failed: {', '.join(failed)}")
