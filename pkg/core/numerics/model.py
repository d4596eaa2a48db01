"""
Domain types shared by the prox operators, the solver, the oracle and the harness.

Indices are 0-based. All value types freeze their arrays after construction.
"""
import abc
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .exceptions import (
    BoxError,
    DimensionMismatchError,
    EmptyGroupError,
    ParameterError,
    PartitionCoverageError,
    PartitionOverlapError,
)

# phi of a point outside the box
INFEASIBLE = math.inf


def _frozen(array, dtype=float):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


class GroupPartition:
    """
    Non-overlapping groups covering every coordinate 0..n-1.
    """

    def __init__(self, group_index_lists, n):
        self.n = int(n)
        self.group_index_lists = tuple(_frozen(g, dtype=np.int64).reshape(-1) for g in group_index_lists)
        validate_partition(self)
        labels = np.empty(self.n, dtype=np.int64)
        for j, group in enumerate(self.group_index_lists):
            labels[group] = j
        labels.setflags(write=False)
        # labels[i] is the group holding coordinate i
        self.labels = labels

    @classmethod
    def contiguous(cls, n, width):
        """Groups of `width` consecutive coordinates; width must divide n."""
        if width < 1 or n % width != 0:
            raise ParameterError(f"Group width {width} does not divide n={n}")
        return cls([np.arange(start, start + width) for start in range(0, n, width)], n)

    @property
    def q(self):
        return len(self.group_index_lists)

    def group_sizes(self):
        return np.array([len(g) for g in self.group_index_lists], dtype=np.int64)

    def __len__(self):
        return self.q

    def __repr__(self):
        return f"GroupPartition(n={self.n}, q={self.q})"


def validate_partition(partition):
    """
    Accept iff groups are non-empty, pairwise disjoint and cover 0..n-1.
    Raises EmptyGroupError, PartitionOverlapError or PartitionCoverageError.
    """
    n = partition.n
    owner = np.full(n, -1, dtype=np.int64)
    for j, group in enumerate(partition.group_index_lists):
        if len(group) == 0:
            raise EmptyGroupError(f"Group {j} is empty", index=j)
        for i in group:
            i = int(i)
            if i < 0 or i >= n:
                raise PartitionCoverageError(f"Index {i} in group {j} lies outside 0..{n - 1}", index=i)
            if owner[i] != -1:
                raise PartitionOverlapError(
                    f"Index {i} belongs to both group {owner[i]} and group {j}", index=i
                )
            owner[i] = j
    missing = np.flatnonzero(owner == -1)
    if missing.size:
        raise PartitionCoverageError(f"Index {int(missing[0])} is not covered by any group", index=int(missing[0]))


class BoxConstraint:
    """
    Feasible set {x : -lower <= x <= upper}. Both magnitudes are non-negative and
    may be +inf, so the origin is always feasible.
    """

    def __init__(self, lower_magnitudes, upper_magnitudes):
        lower = np.array(lower_magnitudes, dtype=float).reshape(-1)
        upper = np.array(upper_magnitudes, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise DimensionMismatchError(f"Bounds have different lengths ({lower.size} vs {upper.size})")
        if np.isnan(lower).any() or np.isnan(upper).any():
            raise BoxError("Box bounds must not be NaN")
        if (lower < 0).any() or (upper < 0).any():
            bad = int(np.flatnonzero((lower < 0) | (upper < 0))[0])
            raise BoxError(f"Box magnitudes must be non-negative (coordinate {bad})")
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.lower = lower
        self.upper = upper

    @classmethod
    def symmetric(cls, n, magnitude):
        return cls(np.full(n, magnitude, dtype=float), np.full(n, magnitude, dtype=float))

    @property
    def n(self):
        return self.lower.size

    def forced_zero(self):
        """Mask of coordinates pinned to zero (lower = upper = 0)."""
        return (self.lower == 0) & (self.upper == 0)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        _check_dimension(x, self.n)
        return bool(np.all((x >= -self.lower) & (x <= self.upper)))

    def label(self):
        """Short description used in result files."""
        if np.all(self.lower == self.lower[0]) and np.all(self.upper == self.lower[0]):
            return f"{self.lower[0]:g}"
        return "custom"

    def __repr__(self):
        return f"BoxConstraint(n={self.n}, label={self.label()})"


@dataclass(frozen=True)
class RegularizationParams:
    lam: float
    mu: float
    tau: float

    def __post_init__(self):
        if not (self.lam >= 0):
            raise ParameterError(f"lambda must be non-negative, got {self.lam}")
        if not (self.mu >= 0):
            raise ParameterError(f"mu must be non-negative, got {self.mu}")
        if not (self.tau > 0) or math.isinf(self.tau):
            raise ParameterError(f"tau must be positive and finite, got {self.tau}")

    @property
    def l0_threshold(self):
        return 2.0 * self.tau * self.lam

    def group_threshold(self, group_l0):
        """Squared group threshold 2*tau*(lambda*|z_G|_0 + mu); accepts arrays."""
        return 2.0 * self.tau * (self.lam * np.asarray(group_l0, dtype=float) + self.mu)

    def satisfies_step_condition(self, smoothness_constant):
        return self.tau * smoothness_constant < 1.0


class SmoothObjective(abc.ABC):
    """
    Smooth convex loss f with gradient and smoothness constant L.
    `strong_convexity` stays None unless a subclass knows it.
    """
    strong_convexity = None

    @property
    @abc.abstractmethod
    def n(self):
        ...

    @property
    @abc.abstractmethod
    def smoothness_constant(self):
        ...

    @abc.abstractmethod
    def value(self, x):
        ...

    @abc.abstractmethod
    def gradient(self, x):
        ...

    def value_and_gradient(self, x):
        return self.value(x), self.gradient(x)


class TerminationStatus(Enum):
    RELATIVE_CHANGE = 'RelativeChange'
    OBJECTIVE_TARGET = 'ObjectiveTarget'
    MAX_ITERATIONS = 'MaxIterations'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class IterateRecord:
    k: int
    phi: float
    # ||x^{k+1} - x^k||; None on the final record
    step_norm: Optional[float]
    support: np.ndarray
    l0: int
    l20: int
    min_abs_nonzero: float
    wall_time: float


@dataclass
class SolveTrace:
    records: List[IterateRecord] = field(default_factory=list)
    final_iterate: Optional[np.ndarray] = None
    tau: Optional[float] = None
    smoothness_constant: Optional[float] = None
    warnings: List[str] = field(default_factory=list)
    final_phi: Optional[float] = None
    support_change_count: int = 0
    _termination_status: Optional[TerminationStatus] = None
    _iterations: int = 0

    @property
    def termination_status(self):
        return self._termination_status

    def terminate(self, status, final_iterate, iterations):
        if self._termination_status is not None:
            raise RuntimeError(f"Trace already terminated with {self._termination_status}")
        self._termination_status = TerminationStatus(status)
        self.final_iterate = final_iterate
        self._iterations = int(iterations)

    @property
    def iterations(self):
        return self._iterations

    @property
    def phi_values(self):
        return np.array([r.phi for r in self.records], dtype=float)

    def support_changes(self):
        """Indices k with supp(x^k) != supp(x^{k+1})."""
        return [
            self.records[k].k
            for k in range(len(self.records) - 1)
            if not np.array_equal(self.records[k].support, self.records[k + 1].support)
        ]


def _check_dimension(x, n):
    if x.ndim != 1 or x.size != n:
        raise DimensionMismatchError(f"Expected a vector of length {n}, got shape {x.shape}")


def count_norms(x, partition):
    """
    (number of nonzero entries, number of groups with a nonzero entry).
    Exact zero test: iterates carry literal zeros.
    """
    x = np.asarray(x, dtype=float)
    _check_dimension(x, partition.n)
    nonzero = x != 0.0
    per_group = np.bincount(partition.labels, weights=nonzero.astype(float), minlength=partition.q)
    return int(np.count_nonzero(nonzero)), int(np.count_nonzero(per_group))


def phi(x, objective, params, box, partition):
    """f(x) + lambda*|x|_0 + mu*|x|_{2,0}, or INFEASIBLE outside the box."""
    x = np.asarray(x, dtype=float)
    _check_dimension(x, partition.n)
    if objective.n != partition.n or box.n != partition.n:
        raise DimensionMismatchError(
            f"Objective (n={objective.n}), box (n={box.n}) and partition (n={partition.n}) disagree"
        )
    if not box.contains(x):
        return INFEASIBLE
    l0, l20 = count_norms(x, partition)
    return float(objective.value(x)) + params.lam * l0 + params.mu * l20


def support_of(x):
    return np.flatnonzero(np.asarray(x) != 0.0)


def min_abs_nonzero(x):
    magnitudes = np.abs(x[x != 0.0])
    return float(magnitudes.min()) if magnitudes.size else math.inf
