"""
Seeded generation of recovery instances b = A x* + sigma*xi.

Randomness comes from numpy's PCG64 generator (`np.random.default_rng(seed)`);
regenerating with the same parameters and seed gives bit-identical arrays.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from core.numerics.exceptions import InstanceError
from core.numerics.model import BoxConstraint, GroupPartition
from core.numerics.objectives import make_least_squares

logger = logging.getLogger(__name__)

NONZERO_LOW = 0.1
NONZERO_HIGH = 5.0
COLUMN_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ExperimentInstance:
    A: np.ndarray
    b: np.ndarray
    x_star: np.ndarray
    sigma: float
    w: int
    s: int
    s_groups: int
    box: BoxConstraint
    partition: GroupPartition
    seed: int

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @cached_property
    def least_squares(self):
        return make_least_squares(self.A, self.b)

    def objective(self):
        # power iteration runs once per instance
        return self.least_squares

    def check_invariants(self, structured=True):
        """
        Unit-norm columns always; with `structured`, the ground truth must fill
        exactly s_groups whole groups with entries in [0.1, 5].
        """
        norms = np.linalg.norm(self.A, axis=0)
        if np.max(np.abs(norms - 1.0)) > COLUMN_NORM_TOL:
            raise InstanceError("Design columns are not unit-norm")
        if not structured:
            return
        nonzero = self.x_star != 0.0
        if int(nonzero.sum()) != self.s:
            raise InstanceError(f"Ground truth has {int(nonzero.sum())} nonzeros, expected {self.s}")
        per_group = np.bincount(self.partition.labels, weights=nonzero.astype(float), minlength=self.partition.q)
        active = per_group > 0
        if int(active.sum()) != self.s_groups or np.any(per_group[active] != self.w):
            raise InstanceError("Ground-truth nonzeros do not occupy whole groups")
        values = self.x_star[nonzero]
        if values.size and (values.min() < NONZERO_LOW or values.max() > NONZERO_HIGH):
            raise InstanceError("Ground-truth nonzeros fall outside [0.1, 5]")


def _normalized_gaussian_design(rng, m, n):
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    return np.asfortranarray(A)


def gen_e1(n, m, w, s, sigma, box_magnitude, seed):
    """
    Gaussian design with unit columns, s/w whole groups of width w active with
    entries uniform on [0.1, 5], and b = A x* + sigma*xi.
    """
    if w < 1 or n % w != 0:
        raise InstanceError(f"Group width {w} must divide n={n}")
    if s % w != 0:
        raise InstanceError(f"Group width {w} must divide the sparsity s={s}")
    if s > n or s < 0:
        raise InstanceError(f"Sparsity s={s} must lie in 0..{n}")
    if m < 1:
        raise InstanceError(f"Need at least one measurement, got m={m}")

    rng = np.random.default_rng(seed)
    A = _normalized_gaussian_design(rng, m, n)
    s_groups = s // w
    active = np.sort(rng.choice(n // w, size=s_groups, replace=False))
    positions = (active[:, None] * w + np.arange(w)).reshape(-1)
    x_star = np.zeros(n)
    x_star[positions] = NONZERO_LOW + (NONZERO_HIGH - NONZERO_LOW) * rng.random(s)
    xi = rng.standard_normal(m)
    b = A @ x_star + sigma * xi

    instance = ExperimentInstance(
        A=A,
        b=b,
        x_star=x_star,
        sigma=float(sigma),
        w=int(w),
        s=int(s),
        s_groups=int(s_groups),
        box=BoxConstraint.symmetric(n, box_magnitude),
        partition=GroupPartition.contiguous(n, w),
        seed=int(seed),
    )
    instance.check_invariants()
    logger.info(f"Generated instance n={n} m={m} w={w} s={s} sigma={sigma:g} seed={seed}")
    return instance


def gen_from_signal(x_star, m=None, w=3, sigma=0.1, box_magnitude=10.0, seed=0):
    """
    Instance around a user-supplied ground truth (for example an RGB image with
    the three channels of each pixel grouped together). m defaults to n/6.
    """
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    n = x_star.size
    if w < 1 or n % w != 0:
        raise InstanceError(f"Group width {w} must divide n={n}")
    if m is None:
        m = max(n // 6, 1)
    if m < 1:
        raise InstanceError(f"Need at least one measurement, got m={m}")

    rng = np.random.default_rng(seed)
    A = _normalized_gaussian_design(rng, m, n)
    b = A @ x_star + sigma * rng.standard_normal(m)
    partition = GroupPartition.contiguous(n, w)
    nonzero = x_star != 0.0
    per_group = np.bincount(partition.labels, weights=nonzero.astype(float), minlength=partition.q)
    instance = ExperimentInstance(
        A=A,
        b=b,
        x_star=x_star.copy(),
        sigma=float(sigma),
        w=int(w),
        s=int(nonzero.sum()),
        s_groups=int(np.count_nonzero(per_group)),
        box=BoxConstraint.symmetric(n, box_magnitude),
        partition=partition,
        seed=int(seed),
    )
    instance.check_invariants(structured=False)
    return instance
