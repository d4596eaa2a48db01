"""
Randomized cross-checks of the closed-form operators and the solver against
the brute-force oracles. Used by the `verify` command and the test suite.
"""
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from core.numerics.model import BoxConstraint, GroupPartition, RegularizationParams, TerminationStatus, support_of
from core.numerics.objectives import make_least_squares
from core.numerics.oracle import brute_force_global_min, brute_force_prox, so_point_check
from core.numerics.prox import hard_threshold_l0, prox_objective, prox_sparse_group
from core.numerics.solver import SolverConfig, check_tau_stationary, solve

logger = logging.getLogger(__name__)

PROX_TOLERANCE = 1e-10
STATIONARITY_TOLERANCE = 1e-6
PHI_MATCH_TOLERANCE = 1e-6


@dataclass
class VerificationResult:
    name: str
    trials: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def __str__(self):
        state = 'ok' if self.passed else f'{len(self.failures)} failures'
        return f"{self.name}: {self.trials} trials, {state}"


def _log_uniform(rng, low, high):
    return float(10.0 ** rng.uniform(np.log10(low), np.log10(high)))


def random_partition(rng, n, max_group_size=4):
    """Random non-overlapping groups of size 1..max_group_size covering 0..n-1."""
    order = rng.permutation(n)
    groups = []
    start = 0
    while start < n:
        size = int(rng.integers(1, max_group_size + 1))
        groups.append(order[start:start + size])
        start += size
    return GroupPartition(groups, n)


def random_box(rng, n, zero_fraction=0.15, inf_fraction=0.15):
    """Bounds mixing zeros, infinities and magnitudes in [0.1, 3]."""
    def draw():
        r = rng.random(n)
        finite = rng.uniform(0.1, 3.0, n)
        return np.where(r < zero_fraction, 0.0, np.where(r < zero_fraction + inf_fraction, np.inf, finite))
    return BoxConstraint(draw(), draw())


def random_params(rng, low=1e-3, high=10.0, mu=None):
    return RegularizationParams(
        lam=_log_uniform(rng, low, high),
        mu=_log_uniform(rng, low, high) if mu is None else mu,
        tau=_log_uniform(rng, low, high),
    )


def check_prox_against_oracle(trials=1000, seed=0, max_n=10):
    """Psi of the closed-form prox equals the enumerated minimum."""
    rng = np.random.default_rng(seed)
    result = VerificationResult('prox vs brute force')
    for trial in range(trials):
        n = int(rng.integers(1, max_n + 1))
        partition = random_partition(rng, n)
        box = random_box(rng, n)
        params = random_params(rng)
        s = rng.normal(0.0, 3.0, n)
        closed = prox_objective(prox_sparse_group(s, params, box, partition), s, params, box, partition)
        _, enumerated = brute_force_prox(s, params, box, partition)
        if abs(closed - enumerated) > PROX_TOLERANCE:
            result.failures.append(f"trial {trial}: closed form {closed:.15g} vs oracle {enumerated:.15g}")
        result.trials += 1
    return result


def check_l0_reduction(trials=500, seed=1, max_n=10):
    """With mu = 0 the sparse-group prox is the element hard threshold."""
    rng = np.random.default_rng(seed)
    result = VerificationResult('mu = 0 reduction')
    for trial in range(trials):
        n = int(rng.integers(1, max_n + 1))
        partition = random_partition(rng, n)
        box = random_box(rng, n)
        params = random_params(rng, mu=0.0)
        s = rng.normal(0.0, 3.0, n)
        grouped = prox_sparse_group(s, params, box, partition)
        element = hard_threshold_l0(s, params.l0_threshold, box)
        if not np.array_equal(grouped, element):
            result.failures.append(f"trial {trial}: outputs differ")
        result.trials += 1
    return result


def random_small_problem(rng, n=6, m=12):
    """Well-conditioned least-squares problem with a sparse ground truth."""
    A = rng.standard_normal((m, n))
    x_true = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n), 0.0)
    b = A @ x_true + 0.05 * rng.standard_normal(m)
    w = int(rng.choice([1, 2, 3]))
    box = BoxConstraint(rng.uniform(0.5, 4.0, n), rng.uniform(0.5, 4.0, n))
    return make_least_squares(A, b), box, GroupPartition.contiguous(n, w)


def check_optimality_chain(trials=50, seed=2, n=6):
    """
    The enumerated global minimizer is an SO point and tau-stationary; the
    solver never beats it and matches it whenever the supports agree.
    """
    rng = np.random.default_rng(seed)
    result = VerificationResult('global minimum chain')
    for trial in range(trials):
        objective, box, partition = random_small_problem(rng, n=n, m=2 * n)
        config = SolverConfig(
            lam=_log_uniform(rng, 3e-3, 0.3),
            mu=_log_uniform(rng, 3e-3, 0.3),
            rel_change_tol=1e-13,
            max_iterations=20000,
            record_trace=False,
        )
        params = config.params_for(objective.smoothness_constant)
        x_global, phi_global = brute_force_global_min(objective, params, box, partition)

        if not so_point_check(x_global, objective, box, STATIONARITY_TOLERANCE, tau=params.tau):
            result.failures.append(f"trial {trial}: global minimizer fails the SO-point check")
        if not check_tau_stationary(x_global, objective, params, box, partition, STATIONARITY_TOLERANCE):
            result.failures.append(f"trial {trial}: global minimizer is not tau-stationary")

        x_solver, trace = solve(objective, config, box, partition, np.zeros(n))
        phi_solver = trace.final_phi
        scale = 1.0 + abs(phi_global)
        if phi_solver < phi_global - 1e-9 * scale:
            result.failures.append(f"trial {trial}: solver phi {phi_solver:.15g} below oracle {phi_global:.15g}")
        if (
            trace.termination_status is TerminationStatus.RELATIVE_CHANGE
            and np.array_equal(support_of(x_solver), support_of(x_global))
            and abs(phi_solver - phi_global) > PHI_MATCH_TOLERANCE * scale
        ):
            result.failures.append(f"trial {trial}: same support but phi {phi_solver:.15g} vs {phi_global:.15g}")
        result.trials += 1
    return result


def run_all(seed=0, prox_trials=1000, reduction_trials=500, chain_trials=50):
    results = [
        check_prox_against_oracle(prox_trials, seed=seed),
        check_l0_reduction(reduction_trials, seed=seed + 1),
        check_optimality_chain(chain_trials, seed=seed + 2),
    ]
    for result in results:
        if result.passed:
            logger.info(str(result))
        else:
            logger.warning(f"{result}; first: {result.failures[0]}")
    return results
