import math

import numpy as np
from django.test import SimpleTestCase

from core.numerics.exceptions import (
    BoxError,
    DimensionMismatchError,
    EmptyGroupError,
    ParameterError,
    PartitionCoverageError,
    PartitionOverlapError,
)
from core.numerics.model import (
    INFEASIBLE,
    BoxConstraint,
    GroupPartition,
    RegularizationParams,
    SolveTrace,
    TerminationStatus,
    count_norms,
    phi,
)
from core.numerics.objectives import LeastSquaresObjective


def shifted_quadratic(center):
    """f(x) = 0.5*||x - center||^2 as a least-squares objective with A = I."""
    center = np.asarray(center, dtype=float)
    return LeastSquaresObjective(np.eye(center.size), center, 1.0)


class GroupPartitionTest(SimpleTestCase):
    def test_valid_partition(self):
        partition = GroupPartition([[0, 1], [2]], 3)
        self.assertEqual(partition.q, 2)
        self.assertEqual(list(partition.labels), [0, 0, 1])
        self.assertEqual(list(partition.group_sizes()), [2, 1])

    def test_overlap_names_index(self):
        with self.assertRaises(PartitionOverlapError) as ctx:
            GroupPartition([[0, 1], [1, 2]], 3)
        self.assertEqual(ctx.exception.index, 1)

    def test_gap_names_index(self):
        with self.assertRaises(PartitionCoverageError) as ctx:
            GroupPartition([[0], [2]], 3)
        self.assertEqual(ctx.exception.index, 1)

    def test_out_of_range_index(self):
        with self.assertRaises(PartitionCoverageError):
            GroupPartition([[0, 1], [3]], 3)

    def test_empty_group(self):
        with self.assertRaises(EmptyGroupError) as ctx:
            GroupPartition([[0, 1, 2], []], 3)
        self.assertEqual(ctx.exception.index, 1)

    def test_contiguous(self):
        partition = GroupPartition.contiguous(8, 4)
        self.assertEqual(partition.q, 2)
        self.assertEqual(list(partition.labels), [0, 0, 0, 0, 1, 1, 1, 1])

    def test_contiguous_width_must_divide(self):
        with self.assertRaises(ParameterError):
            GroupPartition.contiguous(10, 4)

    def test_labels_are_read_only(self):
        partition = GroupPartition.contiguous(4, 2)
        with self.assertRaises(ValueError):
            partition.labels[0] = 1


class BoxConstraintTest(SimpleTestCase):
    def test_negative_magnitude_rejected(self):
        with self.assertRaises(BoxError):
            BoxConstraint([1.0, -1.0], [1.0, 1.0])

    def test_nan_rejected(self):
        with self.assertRaises(BoxError):
            BoxConstraint([1.0, math.nan], [1.0, 1.0])

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            BoxConstraint([1.0], [1.0, 1.0])

    def test_contains_and_forced_zero(self):
        box = BoxConstraint([0.0, 2.0, math.inf], [0.0, 1.0, 0.0])
        self.assertTrue(box.contains(np.array([0.0, -2.0, -100.0])))
        self.assertFalse(box.contains(np.array([0.0, 1.5, 0.0])))
        self.assertEqual(list(box.forced_zero()), [True, False, False])

    def test_label(self):
        self.assertEqual(BoxConstraint.symmetric(4, 5.0).label(), '5')
        self.assertEqual(BoxConstraint([1.0, 2.0], [1.0, 2.0]).label(), 'custom')


class RegularizationParamsTest(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(ParameterError):
            RegularizationParams(-1.0, 0.0, 1.0)
        with self.assertRaises(ParameterError):
            RegularizationParams(0.0, -1.0, 1.0)
        with self.assertRaises(ParameterError):
            RegularizationParams(0.0, 0.0, 0.0)

    def test_thresholds(self):
        params = RegularizationParams(0.5, 1.5, 2.0)
        self.assertEqual(params.l0_threshold, 2.0)
        self.assertEqual(float(params.group_threshold(2)), 10.0)
        self.assertTrue(params.satisfies_step_condition(0.4))
        self.assertFalse(params.satisfies_step_condition(0.5))


class NormsAndPhiTest(SimpleTestCase):
    def setUp(self):
        self.partition = GroupPartition([[0, 1], [2]], 3)
        self.box = BoxConstraint.symmetric(3, 10.0)

    def test_count_norms(self):
        self.assertEqual(count_norms(np.zeros(3), self.partition), (0, 0))
        self.assertEqual(count_norms(np.array([3.0, 0.0, 0.0]), self.partition), (1, 1))
        self.assertEqual(count_norms(np.ones(3), self.partition), (3, 2))

    def test_count_norms_dimension(self):
        with self.assertRaises(DimensionMismatchError):
            count_norms(np.zeros(4), self.partition)

    def test_phi_at_origin(self):
        objective = shifted_quadratic(np.zeros(3))
        params = RegularizationParams(1.0, 1.0, 1.0)
        self.assertEqual(phi(np.zeros(3), objective, params, self.box, self.partition), 0.0)

    def test_phi_example(self):
        objective = shifted_quadratic([3.0, 0.1, 1.2])
        params = RegularizationParams(0.5, 1.5, 1.0)
        value = phi(np.array([3.0, 0.0, 0.0]), objective, params, self.box, self.partition)
        self.assertAlmostEqual(value, 2.725, places=12)

    def test_phi_infeasible(self):
        objective = shifted_quadratic(np.zeros(3))
        params = RegularizationParams(1.0, 1.0, 1.0)
        value = phi(np.array([11.0, 0.0, 0.0]), objective, params, self.box, self.partition)
        self.assertEqual(value, INFEASIBLE)
        self.assertTrue(math.isinf(value))


class SolveTraceTest(SimpleTestCase):
    def test_terminates_once(self):
        trace = SolveTrace()
        trace.terminate(TerminationStatus.RELATIVE_CHANGE, np.zeros(2), 1)
        self.assertEqual(str(trace.termination_status), 'RelativeChange')
        self.assertEqual(trace.iterations, 1)
        with self.assertRaises(RuntimeError):
            trace.terminate(TerminationStatus.MAX_ITERATIONS, np.zeros(2), 2)


class NormInvariantsTest(SimpleTestCase):
    def test_random_vectors(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            n = int(rng.integers(1, 13))
            groups = np.array_split(rng.permutation(n), int(rng.integers(1, n + 1)))
            partition = GroupPartition(groups, n)
            x = np.where(rng.random(n) < 0.5, 0.0, rng.standard_normal(n))
            l0, l20 = count_norms(x, partition)

            self.assertEqual(l0 == 0, l20 == 0)
            self.assertLessEqual(l20, l0)
            self.assertLessEqual(l0, l20 * max(partition.group_sizes()))

            restricted = np.where(rng.random(n) < 0.5, 0.0, x)
            r0, r20 = count_norms(restricted, partition)
            self.assertLessEqual(r0, l0)
            self.assertLessEqual(r20, l20)

    def test_phi_equals_loss_without_penalties(self):
        rng = np.random.default_rng(42)
        partition = GroupPartition.contiguous(6, 2)
        box = BoxConstraint.symmetric(6, 2.0)
        objective = LeastSquaresObjective(rng.standard_normal((4, 6)), rng.standard_normal(4), 1.0)
        params = RegularizationParams(0.0, 0.0, 1.0)
        for _ in range(50):
            x = np.clip(rng.standard_normal(6), -2.0, 2.0)
            self.assertEqual(phi(x, objective, params, box, partition), objective.value(x))
