import numpy as np
from django.test import SimpleTestCase

from core.harness.verification import check_optimality_chain
from core.numerics.exceptions import OracleSizeError
from core.numerics.model import BoxConstraint, GroupPartition, RegularizationParams, SmoothObjective
from core.numerics.objectives import make_least_squares
from core.numerics.oracle import brute_force_global_min, brute_force_prox, so_point_check


class WeightedQuadratic(SmoothObjective):
    """f(x) = 0.5 * sum(w * (x - c)^2); not a least-squares objective, so the oracle falls back to projected gradient."""

    def __init__(self, weights, center):
        self.weights = np.asarray(weights, dtype=float)
        self.center = np.asarray(center, dtype=float)

    @property
    def n(self):
        return self.center.size

    @property
    def smoothness_constant(self):
        return float(self.weights.max())

    def value(self, x):
        return 0.5 * float(np.sum(self.weights * (x - self.center) ** 2))

    def gradient(self, x):
        return self.weights * (x - self.center)


class BruteForceProxTest(SimpleTestCase):
    def test_tie_prefers_zero(self):
        box = BoxConstraint.symmetric(1, 5.0)
        partition = GroupPartition([[0]], 1)
        x, psi = brute_force_prox(np.array([1.0]), RegularizationParams(0.5, 0.0, 1.0), box, partition)
        np.testing.assert_array_equal(x, [0.0])
        self.assertEqual(psi, 0.5)

    def test_size_limit(self):
        n = 17
        with self.assertRaises(OracleSizeError):
            brute_force_prox(
                np.zeros(n), RegularizationParams(0.1, 0.1, 1.0),
                BoxConstraint.symmetric(n, 1.0), GroupPartition.contiguous(n, 1),
            )


class BruteForceGlobalMinTest(SimpleTestCase):
    def test_separable_least_squares(self):
        objective = make_least_squares(np.eye(3), np.array([3.0, 0.1, 1.2]))
        params = RegularizationParams(0.5, 1.5, 0.5)
        x, value = brute_force_global_min(
            objective, params, BoxConstraint.symmetric(3, 10.0), GroupPartition([[0, 1], [2]], 3)
        )
        np.testing.assert_allclose(x, [3.0, 0.0, 0.0], atol=1e-10)
        self.assertAlmostEqual(value, 2.725, places=9)

    def test_unpenalized_matches_least_squares(self):
        rng = np.random.default_rng(8)
        A = rng.standard_normal((8, 4))
        b = rng.standard_normal(8)
        objective = make_least_squares(A, b)
        x, _ = brute_force_global_min(
            objective, RegularizationParams(0.0, 0.0, 0.5),
            BoxConstraint.symmetric(4, 100.0), GroupPartition.contiguous(4, 2),
        )
        expected = np.linalg.lstsq(A, b, rcond=None)[0]
        np.testing.assert_allclose(x, expected, atol=1e-8)

    def test_generic_objective(self):
        objective = WeightedQuadratic([1.0, 2.0, 0.5], [2.0, 0.1, -1.5])
        params = RegularizationParams(0.1, 0.0, 0.4)
        x, value = brute_force_global_min(
            objective, params, BoxConstraint.symmetric(3, 10.0), GroupPartition.contiguous(3, 1)
        )
        np.testing.assert_allclose(x, [2.0, 0.0, -1.5], atol=1e-9)
        self.assertAlmostEqual(value, 0.21, places=9)

    def test_size_limit(self):
        n = 13
        objective = make_least_squares(np.eye(n), np.ones(n))
        with self.assertRaises(OracleSizeError):
            brute_force_global_min(
                objective, RegularizationParams(0.1, 0.1, 0.5),
                BoxConstraint.symmetric(n, 1.0), GroupPartition.contiguous(n, 1),
            )

    def test_random_problems_satisfy_optimality_chain(self):
        result = check_optimality_chain(trials=50, seed=21)
        self.assertTrue(result.passed, result.failures[:3])
        self.assertEqual(result.trials, 50)


class SoPointCheckTest(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(9)
        self.A = rng.standard_normal((10, 3))
        self.b = rng.standard_normal(10)
        self.objective = make_least_squares(self.A, self.b)
        self.box = BoxConstraint.symmetric(3, 100.0)

    def test_least_squares_solution(self):
        x = np.linalg.lstsq(self.A, self.b, rcond=None)[0]
        self.assertTrue(so_point_check(x, self.objective, self.box, 1e-8))

    def test_origin_passes_trivially(self):
        self.assertTrue(so_point_check(np.zeros(3), self.objective, self.box, 1e-8))

    def test_infeasible_point_fails(self):
        self.assertFalse(so_point_check(np.array([200.0, 0.0, 0.0]), self.objective, self.box, 1e-8))

    def test_non_minimizer_fails(self):
        x = np.linalg.lstsq(self.A, self.b, rcond=None)[0] + 0.5
        self.assertFalse(so_point_check(x, self.objective, self.box, 1e-8))
