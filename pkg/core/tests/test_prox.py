import math

import numpy as np
from django.test import SimpleTestCase

from core.harness.verification import (
    check_l0_reduction,
    check_prox_against_oracle,
    random_box,
    random_params,
    random_partition,
)
from core.numerics.exceptions import ParameterError
from core.numerics.model import BoxConstraint, GroupPartition, RegularizationParams
from core.numerics.oracle import brute_force_prox
from core.numerics.prox import (
    compute_delta,
    hard_threshold_group,
    hard_threshold_l0,
    project_box,
    prox_objective,
    prox_sparse_group,
)


class ProjectBoxTest(SimpleTestCase):
    def test_feasible_point_unchanged(self):
        box = BoxConstraint.symmetric(3, 2.0)
        s = np.array([1.0, -2.0, 0.5])
        np.testing.assert_array_equal(project_box(s, box), s)

    def test_componentwise_clamp(self):
        box = BoxConstraint([1.0, 2.0], [3.0, 1.0])
        np.testing.assert_array_equal(project_box(np.array([4.0, -5.0]), box), [3.0, -2.0])

    def test_upper_clamp(self):
        box = BoxConstraint([5.0], [5.0])
        np.testing.assert_array_equal(project_box(np.array([10.0]), box), [5.0])


class ProjectionPropertiesTest(SimpleTestCase):
    """Variational inequality, monotonicity and nonexpansiveness of the box projection."""
    tol = 1e-12

    def test_random_boxes(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            n = int(rng.integers(1, 9))
            box = random_box(rng, n)
            a = 4.0 * rng.standard_normal(n)
            b = 4.0 * rng.standard_normal(n)
            y = project_box(4.0 * rng.standard_normal(n), box)
            pa, pb = project_box(a, box), project_box(b, box)

            self.assertTrue(box.contains(pa))
            self.assertLessEqual(float((a - pa) @ (y - pa)), self.tol)
            self.assertGreaterEqual(float((pa - pb) @ (a - b)), -self.tol)
            self.assertLessEqual(np.linalg.norm(pa - pb), np.linalg.norm(a - b) + self.tol)


class HardThresholdTest(SimpleTestCase):
    def test_interior_reduces_to_scalar_threshold(self):
        box = BoxConstraint.symmetric(2, 5.0)
        np.testing.assert_array_equal(hard_threshold_l0(np.array([3.0, 0.1]), 1.0, box), [3.0, 0.0])

    def test_clamped_coordinate_kept(self):
        box = BoxConstraint([5.0], [5.0])
        np.testing.assert_array_equal(hard_threshold_l0(np.array([10.0]), 1.0, box), [5.0])

    def test_tie_goes_to_zero(self):
        box = BoxConstraint.symmetric(1, 5.0)
        np.testing.assert_array_equal(hard_threshold_l0(np.array([1.0]), 1.0, box), [0.0])

    def test_negative_gamma_rejected(self):
        with self.assertRaises(ParameterError):
            hard_threshold_l0(np.array([1.0]), -1.0, BoxConstraint.symmetric(1, 1.0))

    def test_group_threshold(self):
        np.testing.assert_array_equal(hard_threshold_group(np.array([3.0, 0.0]), 2.0), [3.0, 0.0])
        np.testing.assert_array_equal(hard_threshold_group(np.array([1.2]), 2.0), [0.0])
        np.testing.assert_array_equal(hard_threshold_group(np.zeros(3), 0.0), np.zeros(3))


class ProxSparseGroupTest(SimpleTestCase):
    def setUp(self):
        self.partition = GroupPartition([[0, 1], [2]], 3)
        self.box = BoxConstraint.symmetric(3, 10.0)
        self.params = RegularizationParams(0.5, 1.5, 1.0)

    def test_zero_input(self):
        np.testing.assert_array_equal(prox_sparse_group(np.zeros(3), self.params, self.box, self.partition), np.zeros(3))

    def test_worked_example(self):
        s = np.array([3.0, 0.1, 1.2])
        x = prox_sparse_group(s, self.params, self.box, self.partition)
        np.testing.assert_array_equal(x, [3.0, 0.0, 0.0])
        self.assertAlmostEqual(prox_objective(x, s, self.params, self.box, self.partition), 2.725, places=12)

    def test_worked_example_beats_every_pattern(self):
        s = np.array([3.0, 0.1, 1.2])
        x, psi = brute_force_prox(s, self.params, self.box, self.partition)
        np.testing.assert_array_equal(x, [3.0, 0.0, 0.0])
        self.assertAlmostEqual(psi, 2.725, places=12)

    def test_clamped_group_is_kept_when_it_lowers_psi(self):
        """s = 10 on the box [-1, 1] with only a group penalty: keeping 1 costs 41.5, zero costs 50."""
        params = RegularizationParams(0.0, 1.0, 1.0)
        box = BoxConstraint.symmetric(1, 1.0)
        partition = GroupPartition([[0]], 1)
        s = np.array([10.0])
        x = prox_sparse_group(s, params, box, partition)
        np.testing.assert_array_equal(x, [1.0])
        self.assertAlmostEqual(prox_objective(x, s, params, box, partition), 41.5)

    def test_mu_zero_matches_element_threshold(self):
        params = RegularizationParams(0.3, 0.0, 0.7)
        s = np.array([0.2, -1.5, 0.9])
        np.testing.assert_array_equal(
            prox_sparse_group(s, params, self.box, self.partition),
            hard_threshold_l0(s, params.l0_threshold, self.box),
        )

    def test_huge_penalties_zero_everything(self):
        params = RegularizationParams(100.0, 100.0, 1.0)
        s = np.array([3.0, -4.0, 5.0])
        np.testing.assert_array_equal(prox_sparse_group(s, params, self.box, self.partition), np.zeros(3))

    def test_random_instances_match_enumeration(self):
        result = check_prox_against_oracle(trials=1000, seed=11)
        self.assertTrue(result.passed, result.failures[:3])
        self.assertEqual(result.trials, 1000)

    def test_random_instances_mu_zero_reduction(self):
        result = check_l0_reduction(trials=500, seed=12)
        self.assertTrue(result.passed, result.failures[:3])

    def test_output_is_feasible_and_keeps_projected_values(self):
        rng = np.random.default_rng(32)
        for _ in range(300):
            n = int(rng.integers(1, 11))
            partition = random_partition(rng, n)
            box = random_box(rng, n)
            params = random_params(rng)
            s = 3.0 * rng.standard_normal(n)
            x = prox_sparse_group(s, params, box, partition)

            self.assertTrue(box.contains(x))
            kept = x != 0.0
            np.testing.assert_array_equal(x[kept], project_box(s, box)[kept])


class ComputeDeltaTest(SimpleTestCase):
    def test_symmetric_box(self):
        delta = compute_delta(BoxConstraint.symmetric(4, 5.0), 0.5, 1.0)
        self.assertAlmostEqual(delta.delta, 1.0)

    def test_one_sided_bounds(self):
        delta = compute_delta(BoxConstraint([0.0, 2.0], [3.0, 0.0]), 8.0, 1.0)
        self.assertAlmostEqual(delta.delta, 2.0)
        np.testing.assert_allclose(delta.per_coordinate_deltas, [3.0, 2.0])

    def test_forced_zero_coordinates_are_excluded(self):
        delta = compute_delta(BoxConstraint([0.0, 5.0], [0.0, 5.0]), 0.5, 1.0)
        self.assertTrue(math.isnan(delta.per_coordinate_deltas[0]))
        self.assertEqual(list(delta.forced_zero_set), [0])
        self.assertAlmostEqual(delta.delta, 1.0)

    def test_degenerate_inputs(self):
        with self.assertRaises(ParameterError):
            compute_delta(BoxConstraint.symmetric(2, 0.0), 0.5, 1.0)
        with self.assertRaises(ParameterError):
            compute_delta(BoxConstraint.symmetric(2, 1.0), 0.0, 1.0)

    def test_nonzero_outputs_respect_delta(self):
        rng = np.random.default_rng(5)
        box = BoxConstraint(rng.uniform(0.0, 3.0, 50), rng.uniform(0.0, 3.0, 50))
        lam, tau = 0.2, 0.5
        delta = compute_delta(box, lam, tau)
        for _ in range(20):
            z = hard_threshold_l0(rng.normal(0.0, 2.0, 50), 2.0 * lam * tau, box)
            nonzero = np.abs(z[z != 0.0])
            if nonzero.size:
                self.assertGreaterEqual(nonzero.min(), delta.delta)
