import math

import numpy as np

from core.numerics.exceptions import DimensionMismatchError, InstanceError

SUCCESS_THRESHOLD = 0.05


def _pair(x, x_star):
    x = np.asarray(x, dtype=float).reshape(-1)
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    if x.shape != x_star.shape:
        raise DimensionMismatchError(f"Vectors differ in length ({x.size} vs {x_star.size})")
    return x, x_star


def metric_err(x, x_star):
    """Relative recovery error ||x - x*|| / ||x*||."""
    x, x_star = _pair(x, x_star)
    reference = np.linalg.norm(x_star)
    if reference == 0.0:
        raise InstanceError("Relative error is undefined for a zero ground truth")
    return float(np.linalg.norm(x - x_star) / reference)


def metric_psnr(x, x_star):
    """-10*log10(||x - x*||^2 / n); +inf when x equals x*."""
    x, x_star = _pair(x, x_star)
    diff = x - x_star
    mse = float(diff @ diff) / x.size
    if mse == 0.0:
        return math.inf
    return -10.0 * math.log10(mse)


def is_success(err):
    return err <= SUCCESS_THRESHOLD
