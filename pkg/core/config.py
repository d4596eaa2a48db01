"""
Solver configuration built from Django settings plus explicit overrides.
"""
import math

from django.conf import settings

from core.numerics.solver import SolverConfig, TauPolicy

OPTION_KEYS = ('lam', 'mu', 'tau', 'tau_fraction', 'max_iterations', 'rel_change_tol', 'objective_target')


def solver_config(options=None, record_trace=True):
    """
    SolverConfig from SOLVER_DEFAULTS, overridden by any non-None entry of
    `options`. An explicit `tau` wins over `tau_fraction`.
    """
    values = dict(settings.SOLVER_DEFAULTS)
    values['tau'] = None
    values['objective_target'] = -math.inf
    for key, value in (options or {}).items():
        if key in OPTION_KEYS and value is not None:
            values[key] = value

    if values['tau'] is not None:
        tau_policy = TauPolicy.explicit(values['tau'])
    else:
        tau_policy = TauPolicy.fraction_of_inverse_l(values['tau_fraction'])
    return SolverConfig(
        lam=float(values['lam']),
        mu=float(values['mu']),
        tau_policy=tau_policy,
        rel_change_tol=float(values['rel_change_tol']),
        objective_target=float(values['objective_target']),
        max_iterations=int(values['max_iterations']),
        record_trace=record_trace,
    )
