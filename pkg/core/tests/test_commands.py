import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from core.harness.formats import RESULT_COLUMNS, read_instance, read_results_csv
from core.models import BenchmarkSuite, ProblemInstance


def run(*args, **kwargs):
    out = StringIO()
    err = StringIO()
    call_command(*args, stdout=out, stderr=err, **kwargs)
    return out.getvalue(), err.getvalue()


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.addCleanup(self.tmp.cleanup)

    def make_instance(self, name='instance.psgb', n='96', seed='1'):
        path = self.dir / name
        run('gen', str(path), '--n', n, '--seed', seed)
        return path


class GenCommandTest(CommandTestCase):
    def test_writes_instance_with_defaults(self):
        path = self.dir / 'e1.psgb'
        out, _ = run('gen', str(path), '--n', '200', '--seed', '5')
        self.assertIn('Wrote', out)
        instance = read_instance(path)
        self.assertEqual((instance.n, instance.m, instance.w, instance.s, instance.seed), (200, 50, 4, 8, 5))
        self.assertEqual(instance.box.label(), '5')

    def test_same_seed_same_file(self):
        first = self.make_instance('a.psgb', seed='3')
        second = self.make_instance('b.psgb', seed='3')
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_requires_n(self):
        with self.assertRaises(CommandError):
            run('gen', str(self.dir / 'x.psgb'))

    def test_invalid_sparsity(self):
        with self.assertRaises(CommandError):
            run('gen', str(self.dir / 'x.psgb'), '--n', '40', '--s', '6')

    def test_ground_truth_vector(self):
        truth = self.dir / 'truth.txt'
        truth.write_text(' '.join(['0'] * 33 + ['1', '2', '3']))
        path = self.dir / 'signal.psgb'
        run('gen', str(path), '--ground-truth', str(truth))
        instance = read_instance(path)
        self.assertEqual((instance.n, instance.m, instance.w, instance.s), (36, 6, 3, 3))

    def test_register_in_database(self):
        with override_settings(MEDIA_ROOT=str(self.dir / 'media')):
            out, _ = run('gen', str(self.dir / 'named.psgb'), '--n', '48', '--name', 'small')
            problem = ProblemInstance.objects.get(name='small')
            self.assertIn(f'Registered as instance {problem.id}', out)
            self.assertEqual((problem.n, problem.m, problem.w), (48, 12, 4))
            self.assertEqual(problem.box_magnitude, 5.0)
            with problem.file.open('rb') as handle:
                self.assertEqual(handle.read(), (self.dir / 'named.psgb').read_bytes())


class SolveCommandTest(CommandTestCase):
    def test_prints_result_row(self):
        path = self.make_instance()
        out, _ = run('solve', str(path))
        lines = out.splitlines()
        self.assertEqual(lines[0], ','.join(RESULT_COLUMNS))
        row = dict(zip(RESULT_COLUMNS, lines[1].split(',')))
        self.assertEqual(row['n'], '96')
        self.assertEqual(row['lambda'], '0.01')
        self.assertEqual(row['x0'], 'zeros')
        self.assertEqual(row['sigma'], 'nan')

    def test_appends_to_output(self):
        path = self.make_instance()
        output = self.dir / 'results.csv'
        run('solve', str(path), '--output', str(output), '--sigma', '0.01')
        run('solve', str(path), '--output', str(output), '--x0', 'ones', '--method', 'piht')
        rows = read_results_csv(output)
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0]['sigma'], '0.01')
        self.assertEqual(rows[1]['x0'], 'ones')
        self.assertEqual(rows[1]['mu'], '0')

    def test_trace_and_audit(self):
        path = self.make_instance()
        trace = self.dir / 'trace.csv'
        out, _ = run('solve', str(path), '--trace', str(trace), '--audit', '--lambda', '0.005')
        self.assertIn('sufficient decrease: True', out)
        self.assertIn('support audit: True', out)
        self.assertTrue(trace.read_text().startswith('k,phi,step_norm,l0,l20\n'))

    def test_large_tau_warns(self):
        path = self.make_instance()
        _, err = run('solve', str(path), '--tau', '100', '--max-iter', '3')
        self.assertIn('>= 1', err)

    def test_box_override(self):
        path = self.make_instance()
        out, _ = run('solve', str(path), '--box', '0.5')
        row = dict(zip(RESULT_COLUMNS, out.splitlines()[1].split(',')))
        self.assertEqual(row['box'], '0.5')

    def test_errors(self):
        with self.assertRaises(CommandError):
            run('solve', str(self.dir / 'missing.psgb'))
        bad = self.dir / 'bad.psgb'
        bad.write_bytes(b'not an instance')
        with self.assertRaises(CommandError):
            run('solve', str(bad))
        path = self.make_instance()
        with self.assertRaises(CommandError):
            run('solve', str(path), '--lambda', '-1')
        with self.assertRaises(CommandError):
            run('solve', str(path), '--x0', 'halves')
        with self.assertRaises(CommandError):
            run('solve', str(path), '--threads', '2')

    def test_seed_controls_randn_start(self):
        path = self.make_instance()

        def first_phi(seed, name):
            trace = self.dir / name
            run('solve', str(path), '--x0', 'randn', '--seed', seed, '--max-iter', '2', '--trace', str(trace))
            return trace.read_text().splitlines()[1].split(',')[1]

        self.assertEqual(first_phi('5', 'a.csv'), first_phi('5', 'b.csv'))
        self.assertNotEqual(first_phi('5', 'c.csv'), first_phi('6', 'd.csv'))


class ProxCommandTest(CommandTestCase):
    def test_worked_example(self):
        vector = self.dir / 's.txt'
        vector.write_text('3 0.1 1.2')
        out, _ = run('prox', str(vector), '--lambda', '0.5', '--mu', '1.5', '--box', '10', '--check')
        lines = out.splitlines()
        self.assertEqual(lines[0], '3 0 0')
        self.assertTrue(lines[1].startswith('psi 2.72'))
        self.assertTrue(lines[2].startswith('oracle psi 2.72'))

    def test_width_must_divide(self):
        vector = self.dir / 's.txt'
        vector.write_text('1 2 3')
        with self.assertRaises(CommandError):
            run('prox', str(vector), '--w', '2')


class VerifyCommandTest(CommandTestCase):
    def test_small_run_passes(self):
        out, _ = run('verify', '--prox-trials', '50', '--reduction-trials', '50', '--chain-trials', '3')
        self.assertIn('prox vs brute force: 50 trials, ok', out)
        self.assertIn('mu = 0 reduction: 50 trials, ok', out)
        self.assertIn('global minimum chain: 3 trials, ok', out)


class BenchCommandTest(CommandTestCase):
    def test_runs_suite_to_csv(self):
        output = self.dir / 'sparsity.csv'
        out, _ = run('bench', 'sparsity', '--n', '64', '--s-ratio', '0.0625', '--output', str(output))
        rows = read_results_csv(output)
        self.assertEqual([row['n'] for row in rows], ['64', '64'])
        self.assertEqual(rows[0]['mu'], '0')
        self.assertIn('piht', out)
        self.assertIn('2 rows written', out)

    def test_invalid_range(self):
        with self.assertRaises(CommandError):
            run('bench', 'dims', '--n', '64', '--w', '5')

    @mock.patch('core.management.commands.bench.run_benchmark_suite.delay')
    def test_queue(self, mock_delay):
        out, _ = run('bench', 'inits', '--n', '200', '--reps', '2', '--lambda', '0.02', '--queue')
        suite = BenchmarkSuite.objects.get()
        self.assertEqual(suite.parameters['ranges'], {'n': [200]})
        self.assertEqual(suite.parameters['solver'], {'lam': 0.02})
        self.assertEqual(suite.repetitions, 2)
        self.assertEqual(suite.status, 'pending')
        mock_delay.assert_called_once_with(suite.id)
        self.assertIn(f'Suite {suite.id} queued', out)
