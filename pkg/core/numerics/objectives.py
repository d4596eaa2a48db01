"""
Least-squares loss f(x) = 0.5*||Ax - b||^2 and its smoothness constant.
"""
import logging

import numpy as np

from .exceptions import DimensionMismatchError, SmoothnessError
from .model import SmoothObjective

logger = logging.getLogger(__name__)

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX = 1000
SMOOTHNESS_INFLATION = 1.001


def estimate_smoothness(A, tol=POWER_ITERATION_TOL, max_iterations=POWER_ITERATION_MAX,
                        inflation=SMOOTHNESS_INFLATION, seed=0):
    """
    Upper estimate of ||A^T A||_2 by matrix-free power iteration on v -> A^T(Av).

    Power iteration approaches the top eigenvalue from below, so the converged
    value is inflated by `inflation`.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise SmoothnessError(f"Expected a non-empty matrix, got shape {A.shape}")
    if not np.any(A):
        raise SmoothnessError("All-zero matrix has L = 0; no valid step size exists")

    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for iteration in range(1, max_iterations + 1):
        w = A.T @ (A @ v)
        value = np.linalg.norm(w)
        if value == 0.0:
            # start vector in the null space; restart along a column direction
            v = A[np.argmax(np.abs(A).sum(axis=1))].copy()
            v /= np.linalg.norm(v)
            continue
        v = w / value
        converged = abs(value - estimate) <= tol * value
        estimate = value
        if converged:
            logger.debug(f"Power iteration converged after {iteration} iterations: {estimate:.12g}")
            break
    else:
        logger.info(f"Power iteration hit {max_iterations} iterations; estimate {estimate:.12g}")

    return float(estimate * inflation)


class LeastSquaresObjective(SmoothObjective):
    """
    f(x) = 0.5*||Ax - b||^2 with the design stored column-major.
    """

    def __init__(self, A, b, smoothness_constant):
        A = np.array(A, dtype=float, order='F')
        b = np.array(b, dtype=float).reshape(-1)
        A.setflags(write=False)
        b.setflags(write=False)
        self.A = A
        self.b = b
        self._smoothness_constant = float(smoothness_constant)

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def smoothness_constant(self):
        return self._smoothness_constant

    def residual(self, x):
        return self.A @ x - self.b

    def value(self, x):
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def gradient(self, x):
        return self.A.T @ self.residual(x)

    def value_and_gradient(self, x):
        r = self.residual(x)
        return 0.5 * float(r @ r), self.A.T @ r

    def __repr__(self):
        return f"LeastSquaresObjective(m={self.m}, n={self.n}, L={self._smoothness_constant:.6g})"


def make_least_squares(A, b):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatchError(f"Design matrix must be 2-D, got shape {A.shape}")
    if b.ndim != 1 or b.size != A.shape[0]:
        raise DimensionMismatchError(f"Observation has shape {b.shape}, design has {A.shape[0]} rows")
    return LeastSquaresObjective(A, b, estimate_smoothness(A))
