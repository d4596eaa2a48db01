import tempfile
from unittest import mock

from django.contrib.auth.models import User
from django.core.files.base import ContentFile
from django.test import TestCase, override_settings
from rest_framework import status
from rest_framework.test import APIClient

from core.models import BenchmarkSuite, ProblemInstance, SolveRun


def make_run(**kwargs):
    values = dict(
        n=64, m=32, s=4, w=4, sigma=0.001, seed=1, lam=0.01, mu=0.01, tau=0.1, x0='zeros', box='5',
        method='sgb', iterations=10, time_s=0.01, err=0.01, psnr=40.0, phi_final=0.1,
        support_changes=2, status='RelativeChange', success=True,
    )
    values.update(kwargs)
    return SolveRun.objects.create(**values)


class APITestCase(TestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        media = override_settings(MEDIA_ROOT=tmp.name)
        media.enable()
        self.addCleanup(media.disable)

        self.alice = User.objects.create_user(username='alice', password='pass123')
        self.bob = User.objects.create_user(username='bob', password='pass123')
        self.staff = User.objects.create_user(username='staff', password='pass123', is_staff=True)

        self.ready_suite = BenchmarkSuite.objects.create(
            suite_name='sparsity', status='ready', requested_by=self.alice
        )
        self.ready_suite.file.save('suite.csv', ContentFile(b'n,m\n64,32\n'), save=True)
        self.pending_suite = BenchmarkSuite.objects.create(suite_name='dims', requested_by=self.bob)

        self.client = APIClient()


class BenchmarkSuiteAPITest(APITestCase):
    def test_requires_authentication(self):
        response = self.client.get('/api/suites/')
        self.assertEqual(response.status_code, status.HTTP_401_UNAUTHORIZED)

    def test_users_see_only_their_suites(self):
        """Non-staff users only list suites they requested."""
        self.client.force_authenticate(user=self.alice)
        response = self.client.get('/api/suites/')

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        self.assertEqual(response.data[0]['id'], self.ready_suite.id)
        self.assertEqual(response.data[0]['requested_by_username'], 'alice')
        self.assertTrue(response.data[0]['file_url'].endswith('.csv'))

        response = self.client.get(f'/api/suites/{self.pending_suite.id}/')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_staff_see_all_suites(self):
        self.client.force_authenticate(user=self.staff)
        response = self.client.get('/api/suites/')
        self.assertEqual(len(response.data), 2)

    @mock.patch('api.views.run_benchmark_suite.delay')
    def test_create_suite_queues_it(self, mock_delay):
        self.client.force_authenticate(user=self.alice)
        data = {
            'suite_name': 'inits',
            'parameters': {'ranges': {'n': [200], 'x0': ['zeros', 'randn']}, 'solver': {'lam': 0.02}},
            'repetitions': 3,
        }
        response = self.client.post('/api/suites/', data, format='json')

        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        suite = BenchmarkSuite.objects.get(id=response.data['id'])
        self.assertEqual(suite.requested_by, self.alice)
        self.assertEqual(suite.status, 'pending')
        self.assertEqual(suite.repetitions, 3)
        mock_delay.assert_called_once_with(suite.id)

    @mock.patch('api.views.run_benchmark_suite.delay')
    def test_invalid_suites_rejected(self, mock_delay):
        self.client.force_authenticate(user=self.alice)
        invalid = [
            {'suite_name': 'dims', 'parameters': {'ranges': {'w': [7]}}},
            {'suite_name': 'dims', 'parameters': {'ranges': {'gamma': [1]}}},
            {'suite_name': 'dims', 'parameters': {'ranges': {'n': 1000}}},
            {'suite_name': 'dims', 'parameters': {'solver': {'step': 1}}},
            {'suite_name': 'dims', 'parameters': {'solver': {'lam': -1}}},
            {'suite_name': 'dims', 'parameters': {'threads': 0}},
            {'suite_name': 'dims', 'parameters': {'plot': True}},
            {'suite_name': 'lasso'},
        ]
        for data in invalid:
            response = self.client.post('/api/suites/', data, format='json')
            self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST, data)
        mock_delay.assert_not_called()

    def test_download_ready_suite(self):
        self.client.force_authenticate(user=self.alice)
        response = self.client.get(f'/api/suites/{self.ready_suite.id}/download/')

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(b''.join(response.streaming_content), b'n,m\n64,32\n')
        self.assertIn(f'suite_{self.ready_suite.id}.csv', response['Content-Disposition'])

    def test_download_pending_suite(self):
        self.client.force_authenticate(user=self.bob)
        response = self.client.get(f'/api/suites/{self.pending_suite.id}/download/')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_download_without_file(self):
        suite = BenchmarkSuite.objects.create(suite_name='dims', status='ready', requested_by=self.bob)
        self.client.force_authenticate(user=self.bob)
        response = self.client.get(f'/api/suites/{suite.id}/download/')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    @mock.patch('api.views.run_benchmark_suite.delay')
    def test_rerun(self, mock_delay):
        self.client.force_authenticate(user=self.bob)
        response = self.client.post(f'/api/suites/{self.pending_suite.id}/rerun/')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

        self.client.force_authenticate(user=self.alice)
        response = self.client.post(f'/api/suites/{self.ready_suite.id}/rerun/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.ready_suite.refresh_from_db()
        self.assertEqual(self.ready_suite.status, 'pending')
        mock_delay.assert_called_once_with(self.ready_suite.id)


class SolveRunAPITest(APITestCase):
    def setUp(self):
        super().setUp()
        self.alice_run = make_run(suite=self.ready_suite)
        self.bob_run = make_run(suite=self.pending_suite, seed=2)
        self.instance_run = make_run(seed=3, psnr=None)

    def test_visibility(self):
        self.client.force_authenticate(user=self.alice)
        response = self.client.get('/api/runs/')
        ids = {row['id'] for row in response.data}
        self.assertEqual(ids, {self.alice_run.id, self.instance_run.id})

        self.client.force_authenticate(user=self.staff)
        response = self.client.get('/api/runs/')
        self.assertEqual(len(response.data), 3)

    def test_filter_by_suite(self):
        self.client.force_authenticate(user=self.alice)
        response = self.client.get(f'/api/runs/?suite={self.ready_suite.id}')
        self.assertEqual(len(response.data), 1)
        self.assertEqual(response.data[0]['lam'], 0.01)
        self.assertEqual(response.data[0]['status'], 'RelativeChange')

    def test_exact_recovery_has_null_psnr(self):
        self.client.force_authenticate(user=self.alice)
        response = self.client.get(f'/api/runs/{self.instance_run.id}/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIsNone(response.data['psnr'])


class ProblemInstanceAPITest(APITestCase):
    def setUp(self):
        super().setUp()
        self.problem = ProblemInstance.objects.create(
            name='small', n=64, m=32, w=4, s=4, sigma=0.01, seed=5, box_magnitude=5.0, file='instances/small.psgb'
        )

    def test_list(self):
        self.client.force_authenticate(user=self.bob)
        response = self.client.get('/api/instances/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data[0]['name'], 'small')

    def test_read_only(self):
        self.client.force_authenticate(user=self.bob)
        response = self.client.post('/api/instances/', {'name': 'x'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)

    @mock.patch('api.views.solve_problem_instance.delay')
    def test_solve_queues_task(self, mock_delay):
        self.client.force_authenticate(user=self.bob)
        response = self.client.post(f'/api/instances/{self.problem.id}/solve/', {'lam': 0.02}, format='json')
        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        mock_delay.assert_called_once_with(self.problem.id, {'lam': 0.02})

    @mock.patch('api.views.solve_problem_instance.delay')
    def test_solve_rejects_bad_options(self, mock_delay):
        self.client.force_authenticate(user=self.bob)
        invalid = [
            {'lam': -1},
            {'tau_fraction': 1.5},
            {'max_iterations': 0},
            {'method': 'lasso'},
            {'x0': 'file:/etc/passwd'},
            {'gamma': 1},
        ]
        for data in invalid:
            response = self.client.post(f'/api/instances/{self.problem.id}/solve/', data, format='json')
            self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST, data)
        mock_delay.assert_not_called()

    @mock.patch('api.views.solve_problem_instance.delay')
    def test_solve_passes_start_and_method(self, mock_delay):
        self.client.force_authenticate(user=self.bob)
        data = {'x0': 'randn', 'method': 'piht', 'max_iterations': 50}
        response = self.client.post(f'/api/instances/{self.problem.id}/solve/', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        mock_delay.assert_called_once_with(self.problem.id, data)


class HealthCheckTest(TestCase):
    def test_reports_numerical_stack(self):
        response = self.client.get('/health/')
        data = response.json()
        self.assertEqual(data['database'], 'connected')
        self.assertTrue(data['numerics'].startswith('numpy '))
