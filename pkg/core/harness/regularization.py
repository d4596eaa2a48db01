"""
Grid search for (lambda, mu) on a pilot instance.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from core.numerics.exceptions import ParameterError
from core.numerics.solver import solve

from .metrics import metric_err

logger = logging.getLogger(__name__)

# 1e-4, 1e-3.5, ..., 1
REG_GRID = tuple(float(v) for v in 10.0 ** np.arange(-4.0, 0.01, 0.5))

# sgb: element and group penalties; piht: element penalty only (mu = 0)
METHODS = ('sgb', 'piht')


def apply_method(config, method):
    if method not in METHODS:
        raise ParameterError(f"Unknown method '{method}', expected one of {', '.join(METHODS)}")
    if method == 'piht':
        return replace(config, mu=0.0)
    return config


@dataclass(frozen=True)
class TunedRegularization:
    lam: float
    mu: float
    err: float
    evaluated: int


def tune_regularization(instance, config, x0=None, method='sgb', grid=REG_GRID):
    """
    Solve the pilot instance for every grid pair and keep the pair with the
    smallest recovery error. For piht only lambda is searched. Ties keep the
    first pair in grid order.
    """
    if not grid:
        raise ParameterError('Regularization grid is empty')
    apply_method(config, method)
    objective = instance.objective()
    if x0 is None:
        x0 = np.zeros(instance.n)
    mus = (0.0,) if method == 'piht' else grid

    best = None
    evaluated = 0
    for lam in grid:
        for mu in mus:
            trial = replace(config, lam=float(lam), mu=float(mu), record_trace=False)
            x, _ = solve(objective, trial, instance.box, instance.partition, x0)
            err = metric_err(x, instance.x_star)
            evaluated += 1
            if best is None or err < best[2]:
                best = (float(lam), float(mu), err)

    tuned = TunedRegularization(lam=best[0], mu=best[1], err=best[2], evaluated=evaluated)
    logger.info(
        f"Auto-reg ({method}) on pilot seed {instance.seed}: lambda={tuned.lam:g} mu={tuned.mu:g} "
        f"err={tuned.err:.4e} over {evaluated} pairs"
    )
    return tuned
