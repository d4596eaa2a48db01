"""
Closed-form projection and hard-thresholding operators.

All thresholds send boundary ties to zero, so every map here is single-valued.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, ParameterError
from .model import INFEASIBLE, count_norms


def _as_vector(s, n=None):
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or (n is not None and s.size != n):
        raise DimensionMismatchError(f"Expected a vector of length {n}, got shape {s.shape}")
    return s


def project_box(s, box):
    """Componentwise clamp of s into [-lower, upper]."""
    s = _as_vector(s, box.n)
    return np.clip(s, -box.lower, box.upper)


def hard_threshold_l0(s, gamma, box):
    """
    Keep the projected value of coordinate i when s_i^2 - d_i^2 > gamma, where
    d = project_box(s) - s; otherwise write an exact zero.
    With gamma = 2*lam*tau this is the prox of tau*lam*|.|_0 restricted to the box.
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    s = _as_vector(s, box.n)
    p = np.clip(s, -box.lower, box.upper)
    d = p - s
    return np.where(s * s - d * d > gamma, p, 0.0)


def hard_threshold_group(z_group, gamma):
    """Return z_group if its Euclidean norm exceeds gamma, else zeros."""
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    z_group = np.asarray(z_group, dtype=float)
    if np.linalg.norm(z_group) > gamma:
        return z_group.copy()
    return np.zeros_like(z_group)


def group_threshold_from_l0(s, z, params, partition):
    """
    Second stage of the sparse-group prox: given s and z = hard_threshold_l0(s),
    zero every group whose decrease ||s_G||^2 - ||z_G - s_G||^2 does not exceed
    2*tau*(lam*|z_G|_0 + mu).

    Without clamping inside a group the decrease equals ||z_G||^2, which is the
    plain group hard threshold; the decrease form stays exact when the box clamps.
    """
    if params.mu == 0:
        # every kept coordinate already clears 2*tau*lam on its own
        return z
    r = z - s
    decrease = np.bincount(partition.labels, weights=s * s - r * r, minlength=partition.q)
    group_l0 = np.bincount(partition.labels, weights=(z != 0.0).astype(float), minlength=partition.q)
    keep = decrease > params.group_threshold(group_l0)
    return np.where(keep[partition.labels], z, 0.0)


def prox_sparse_group(s, params, box, partition):
    """
    Minimizer of 0.5*||x - s||^2 + tau*lam*|x|_0 + tau*mu*|x|_{2,0} over the box.
    """
    s = _as_vector(s, partition.n)
    if box.n != partition.n:
        raise DimensionMismatchError(f"Box has n={box.n}, partition has n={partition.n}")
    z = hard_threshold_l0(s, params.l0_threshold, box)
    return group_threshold_from_l0(s, z, params, partition)


def prox_objective(x, s, params, box, partition):
    """Psi(x; s) = 0.5*||x - s||^2 + tau*lam*|x|_0 + tau*mu*|x|_{2,0}, INFEASIBLE off the box."""
    x = _as_vector(x, partition.n)
    s = _as_vector(s, partition.n)
    if not box.contains(x):
        return INFEASIBLE
    l0, l20 = count_norms(x, partition)
    diff = x - s
    return 0.5 * float(diff @ diff) + params.tau * (params.lam * l0 + params.mu * l20)


@dataclass(frozen=True)
class DeltaBound:
    """
    Lower bound on the magnitude of any nonzero coordinate produced by
    hard_threshold_l0(., 2*lam*tau, box). per_coordinate_deltas is NaN on the
    forced-zero set.
    """
    delta: float
    per_coordinate_deltas: np.ndarray
    forced_zero_set: np.ndarray


def compute_delta(box, lam, tau):
    product = lam * tau
    if not product > 0:
        raise ParameterError(f"lambda*tau must be positive for a delta bound, got {product}")
    forced = box.forced_zero()
    if forced.all():
        raise ParameterError("Every coordinate is forced to zero; delta is undefined")
    root = math.sqrt(2.0 * product)
    lower, upper = box.lower, box.upper
    deltas = np.where(
        lower == 0,
        np.minimum(upper, root),
        np.where(upper == 0, np.minimum(lower, root), np.minimum(np.minimum(lower, upper), root)),
    )
    deltas = np.where(forced, np.nan, deltas)
    deltas.setflags(write=False)
    forced_set = np.flatnonzero(forced)
    forced_set.setflags(write=False)
    return DeltaBound(
        delta=float(np.nanmin(deltas)),
        per_coordinate_deltas=deltas,
        forced_zero_set=forced_set,
    )
