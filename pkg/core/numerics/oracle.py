"""
Brute-force verifiers over all support patterns, for small n only.

These never call the closed-form prox, so they can be used to check it.
"""
import logging

import numpy as np
from scipy.optimize import lsq_linear

from .exceptions import OracleSizeError
from .model import count_norms, phi
from .objectives import LeastSquaresObjective
from .prox import project_box

logger = logging.getLogger(__name__)

MAX_PROX_DIMENSION = 16
MAX_GLOBAL_DIMENSION = 12
PGD_TOLERANCE = 1e-12
PGD_MAX_ITERATIONS = 100000


def _support_masks(n):
    codes = np.arange(2 ** n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)


def brute_force_prox(s, params, box, partition):
    """
    Minimize Psi(.; s) over every support pattern. On a fixed support the smooth
    part is separable, so the candidate is the clamp of s there and zero elsewhere.
    Ties prefer fewer nonzeros, then fewer nonzero groups, then zeros in the
    leading coordinates. Returns (x, psi).
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    if n > MAX_PROX_DIMENSION:
        raise OracleSizeError(f"Prox enumeration is limited to n <= {MAX_PROX_DIMENSION}, got {n}")

    masks = _support_masks(n)
    candidates = np.where(masks, project_box(s, box), 0.0)
    nonzero = candidates != 0.0
    incidence = np.zeros((n, partition.q))
    incidence[np.arange(n), partition.labels] = 1.0
    l0 = nonzero.sum(axis=1)
    l20 = ((nonzero @ incidence) > 0).sum(axis=1)
    psi = 0.5 * ((candidates - s) ** 2).sum(axis=1) + params.tau * (params.lam * l0 + params.mu * l20)

    # lexsort: last key is primary
    keys = [nonzero[:, i] for i in reversed(range(n))] + [l20, l0, psi]
    best = np.lexsort(keys)[0]
    return candidates[best].copy(), float(psi[best])


def _restricted_least_squares(objective, box, support):
    result = lsq_linear(
        objective.A[:, support],
        objective.b,
        bounds=(-box.lower[support], box.upper[support]),
        method='bvls',
        tol=1e-12,
    )
    return result.x


def _restricted_projected_gradient(objective, box, support):
    n = objective.n
    step_size = 1.0 / objective.smoothness_constant
    lower = np.zeros(n)
    upper = np.zeros(n)
    lower[support] = -box.lower[support]
    upper[support] = box.upper[support]
    x = np.zeros(n)
    for _ in range(PGD_MAX_ITERATIONS):
        x_next = np.clip(x - step_size * objective.gradient(x), lower, upper)
        gap = np.linalg.norm(x_next - x) / step_size
        x = x_next
        if gap <= PGD_TOLERANCE:
            break
    return x[support]


def brute_force_global_min(objective, params, box, partition):
    """
    Global minimizer of phi by minimizing f over the box on every support pattern.
    Returns (x, phi).
    """
    n = objective.n
    if n > MAX_GLOBAL_DIMENSION:
        raise OracleSizeError(f"Global enumeration is limited to n <= {MAX_GLOBAL_DIMENSION}, got {n}")

    forced = box.forced_zero()
    best_x = np.zeros(n)
    best_key = (phi(best_x, objective, params, box, partition), 0, 0)
    for mask in _support_masks(n)[1:]:
        if (mask & forced).any():
            # same candidates as the pattern without the pinned coordinates
            continue
        support = np.flatnonzero(mask)
        if isinstance(objective, LeastSquaresObjective):
            values = _restricted_least_squares(objective, box, support)
        else:
            values = _restricted_projected_gradient(objective, box, support)
        x = np.zeros(n)
        x[support] = np.clip(values, -box.lower[support], box.upper[support])
        l0, l20 = count_norms(x, partition)
        key = (phi(x, objective, params, box, partition), l0, l20)
        if key < best_key:
            best_key, best_x = key, x
    logger.debug(f"Global minimum over {2 ** n} patterns: phi={best_key[0]:.12g}")
    return best_x, float(best_key[0])


def so_point_check(x, objective, box, tol, tau=None):
    """
    True iff x is feasible and x = P_X(x - tau*grad f(x)) in the sup norm, scaled
    by 1 + ||x||_inf, where X is the box intersected with {supp(y) in supp(x)}.
    For convex f this certifies that x minimizes f on X.
    """
    x = np.asarray(x, dtype=float)
    if not box.contains(x):
        return False
    if tau is None:
        tau = 0.99 / objective.smoothness_constant
    s = x - tau * objective.gradient(x)
    restricted = np.where(x != 0.0, project_box(s, box), 0.0)
    gap = np.max(np.abs(x - restricted), initial=0.0)
    return bool(gap <= tol * (1.0 + np.max(np.abs(x), initial=0.0)))
