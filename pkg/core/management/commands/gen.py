from django.core.files.base import ContentFile
from django.core.management.base import BaseCommand, CommandError

from core.harness.formats import instance_to_bytes, read_vector, write_instance
from core.harness.instances import gen_e1, gen_from_signal
from core.models import ProblemInstance
from core.numerics.exceptions import SparseRecoveryError


class Command(BaseCommand):
    help = 'Generate a recovery instance and write it as an instance file'

    def add_arguments(self, parser):
        parser.add_argument('output', help='Path of the instance file to write')
        parser.add_argument('--n', type=int, help='Signal length (ignored with --ground-truth)')
        parser.add_argument('--m', type=int, help='Measurements (default n/4, or n/6 with --ground-truth)')
        parser.add_argument('--w', type=int, help='Group width (default 4, or 3 with --ground-truth)')
        parser.add_argument('--s', type=int, help='Nonzeros (default 0.05n rounded to a multiple of w)')
        parser.add_argument('--sigma', type=float, help='Noise level (default 0.01, or 0.1 with --ground-truth)')
        parser.add_argument('--box', dest='box_magnitude', type=float, help='Box magnitude (default 5, or 10 with --ground-truth)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--ground-truth', help='Vector file holding x* (.npy or text)')
        parser.add_argument('--name', help='Also register the instance in the database under this name')

    def handle(self, *args, **options):
        try:
            if options['ground_truth']:
                instance = self._from_signal(options)
            else:
                instance = self._synthetic(options)
            path = write_instance(options['output'], instance)
        except (SparseRecoveryError, OSError) as e:
            raise CommandError(str(e))

        self.stdout.write(self.style.SUCCESS(
            f'Wrote {path}: n={instance.n} m={instance.m} w={instance.w} s={instance.s} seed={instance.seed}'
        ))

        if options['name']:
            problem = ProblemInstance(
                name=options['name'],
                n=instance.n,
                m=instance.m,
                w=instance.w,
                s=instance.s,
                sigma=instance.sigma,
                seed=instance.seed,
                box_magnitude=float(instance.box.upper[0]) if instance.box.label() != 'custom' else None,
            )
            problem.file.save(f'{options["name"]}.psgb', ContentFile(instance_to_bytes(instance)), save=True)
            self.stdout.write(f'Registered as instance {problem.id}')

    def _synthetic(self, options):
        n = options['n']
        if n is None:
            raise CommandError('--n is required unless --ground-truth is given')
        w = options['w'] or 4
        m = options['m'] or max(n // 4, 1)
        s = options['s']
        if s is None:
            s = w * max(1, round(0.05 * n / w))
        sigma = 0.01 if options['sigma'] is None else options['sigma']
        box = 5.0 if options['box_magnitude'] is None else options['box_magnitude']
        return gen_e1(n, m, w, s, sigma, box, options['seed'])

    def _from_signal(self, options):
        x_star = read_vector(options['ground_truth'])
        return gen_from_signal(
            x_star,
            m=options['m'],
            w=options['w'] or 3,
            sigma=0.1 if options['sigma'] is None else options['sigma'],
            box_magnitude=10.0 if options['box_magnitude'] is None else options['box_magnitude'],
            seed=options['seed'],
        )
