"""
Proximal iterative hard thresholding with element and group sparsity over a box,
plus runtime checks of its convergence guarantees.

One iteration:
    s      = x - tau * grad f(x)
    z      = hard_threshold_l0(s, 2*lam*tau, box)
    x_next = group threshold of z (see prox.group_threshold_from_l0)

With mu = 0 the group stage never removes anything and the iteration is plain
proximal iterative hard thresholding.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import NonFiniteGradientError, ParameterError
from .model import (
    IterateRecord,
    RegularizationParams,
    SolveTrace,
    TerminationStatus,
    count_norms,
    min_abs_nonzero,
    support_of,
)
from .prox import group_threshold_from_l0, hard_threshold_l0, project_box, prox_sparse_group

logger = logging.getLogger(__name__)

DECREASE_SLACK = 1e-10


@dataclass(frozen=True)
class TauPolicy:
    """Either an explicit step size or a fraction of 1/L."""
    tau: Optional[float] = None
    fraction: float = 0.99

    @classmethod
    def explicit(cls, tau):
        return cls(tau=float(tau))

    @classmethod
    def fraction_of_inverse_l(cls, fraction=0.99):
        return cls(fraction=float(fraction))

    @property
    def is_explicit(self):
        return self.tau is not None

    def resolve(self, smoothness_constant):
        if self.is_explicit:
            return self.tau
        return self.fraction / smoothness_constant

    def __str__(self):
        return f"tau={self.tau:g}" if self.is_explicit else f"tau={self.fraction:g}/L"


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.01
    mu: float = 0.01
    tau_policy: TauPolicy = field(default_factory=TauPolicy)
    rel_change_tol: float = 1e-6
    objective_target: float = -math.inf
    max_iterations: int = 100
    record_trace: bool = True
    stationarity_tol: float = 1e-8

    def __post_init__(self):
        if self.rel_change_tol <= 0:
            raise ParameterError(f"rel_change_tol must be positive, got {self.rel_change_tol}")
        if self.max_iterations < 1:
            raise ParameterError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.stationarity_tol <= 0:
            raise ParameterError(f"stationarity_tol must be positive, got {self.stationarity_tol}")
        if not self.tau_policy.is_explicit and not 0 < self.tau_policy.fraction < 1:
            raise ParameterError(f"tau fraction must lie in (0, 1), got {self.tau_policy.fraction}")
        # validates lam and mu early
        RegularizationParams(self.lam, self.mu, 1.0)

    @property
    def audit_tol(self):
        """Tolerance for stationarity audits at termination; never tighter than the stopping rule."""
        return max(self.stationarity_tol, self.rel_change_tol)

    def params_for(self, smoothness_constant):
        return RegularizationParams(self.lam, self.mu, self.tau_policy.resolve(smoothness_constant))


@dataclass(frozen=True)
class IterateDiagnostics:
    s_tau: np.ndarray
    d_tau: np.ndarray
    z: np.ndarray


def step(x, objective, params, box, partition, gradient=None):
    """One iteration from x; returns (x_next, diagnostics)."""
    x = np.asarray(x, dtype=float)
    if gradient is None:
        gradient = objective.gradient(x)
    if not np.all(np.isfinite(gradient)):
        raise NonFiniteGradientError("Gradient has non-finite entries")
    s = x - params.tau * gradient
    z = hard_threshold_l0(s, params.l0_threshold, box)
    x_next = group_threshold_from_l0(s, z, params, partition)
    diag = IterateDiagnostics(s_tau=s, d_tau=project_box(s, box) - s, z=z)
    return x_next, diag


def _record(k, phi_value, step_norm, x, l0, l20, start):
    return IterateRecord(
        k=k,
        phi=phi_value,
        step_norm=step_norm,
        support=support_of(x),
        l0=l0,
        l20=l20,
        min_abs_nonzero=min_abs_nonzero(x),
        wall_time=time.perf_counter() - start,
    )


def solve(objective, config, box, partition, x0):
    """
    Iterate from the projection of x0 until the relative change, the objective
    target or the iteration cap stops the run. Returns (x_final, trace).
    """
    L = objective.smoothness_constant
    params = config.params_for(L)
    trace = SolveTrace(tau=params.tau, smoothness_constant=L)
    if not params.satisfies_step_condition(L):
        message = f"tau*L = {params.tau * L:.6g} >= 1; descent guarantees do not apply"
        trace.warnings.append(message)
        logger.warning(message)

    x = project_box(np.asarray(x0, dtype=float), box)
    start = time.perf_counter()
    previous_mask = None
    last_step = None
    k = 0
    while True:
        fx, gradient = objective.value_and_gradient(x)
        l0, l20 = count_norms(x, partition)
        phi_value = float(fx) + params.lam * l0 + params.mu * l20
        mask = x != 0.0
        if previous_mask is not None and not np.array_equal(mask, previous_mask):
            trace.support_change_count += 1

        status = None
        if k >= 1:
            if last_step / max(1.0, float(np.linalg.norm(x))) <= config.rel_change_tol:
                status = TerminationStatus.RELATIVE_CHANGE
            elif fx <= config.objective_target:
                status = TerminationStatus.OBJECTIVE_TARGET
            elif k >= config.max_iterations:
                status = TerminationStatus.MAX_ITERATIONS
        if status is not None:
            if config.record_trace:
                trace.records.append(_record(k, phi_value, None, x, l0, l20, start))
            trace.final_phi = phi_value
            trace.terminate(status, x, k)
            break

        x_next, _ = step(x, objective, params, box, partition, gradient=gradient)
        last_step = float(np.linalg.norm(x_next - x))
        if config.record_trace:
            trace.records.append(_record(k, phi_value, last_step, x, l0, l20, start))
        logger.debug(f"iter {k}: phi={phi_value:.10g} step={last_step:.3e} l0={l0} l20={l20}")
        previous_mask = mask
        x = x_next
        k += 1

    logger.info(
        f"Solve finished: {trace.termination_status} after {trace.iterations} iterations, "
        f"phi={trace.final_phi:.10g}, support changes={trace.support_change_count}"
    )
    return x, trace


def check_tau_stationary(x, objective, params, box, partition, tol):
    """True iff x is feasible and a fixed point of the prox of its own gradient step."""
    x = np.asarray(x, dtype=float)
    if not box.contains(x):
        return False
    s = x - params.tau * objective.gradient(x)
    gap = np.max(np.abs(x - prox_sparse_group(s, params, box, partition)), initial=0.0)
    return bool(gap <= tol * (1.0 + np.max(np.abs(x), initial=0.0)))


@dataclass(frozen=True)
class DecreaseCheck:
    ok: bool
    failed_step: Optional[int] = None
    worst_margin: float = math.inf

    def __bool__(self):
        return self.ok


def verify_sufficient_decrease(trace, L, tau):
    """
    Check phi(x^k) - phi(x^{k+1}) >= ((1/tau - L)/2) * ||x^{k+1} - x^k||^2 on
    every recorded step, within slack 1e-10*(1 + |phi(x^k)|).
    """
    coefficient = 0.5 * (1.0 / tau - L)
    records = trace.records
    worst = math.inf
    for current, following in zip(records, records[1:]):
        decrease = current.phi - following.phi
        required = coefficient * current.step_norm ** 2
        margin = decrease - required + DECREASE_SLACK * (1.0 + abs(current.phi))
        worst = min(worst, margin)
        if margin < 0:
            logger.warning(f"Sufficient decrease fails at step {current.k}: {decrease:.6e} < {required:.6e}")
            return DecreaseCheck(ok=False, failed_step=current.k, worst_margin=margin)
    return DecreaseCheck(ok=True, worst_margin=worst)


@dataclass(frozen=True)
class SupportAudit:
    change_count: int
    bound: float
    within_bound: bool
    # true when the run hit the iteration cap, so the final phi only estimates the limit
    approximate: bool
    short_step_changes: List[int] = field(default_factory=list)
    small_magnitude_iterates: List[int] = field(default_factory=list)

    @property
    def passed(self):
        return self.within_bound and not self.short_step_changes and not self.small_magnitude_iterates


def support_change_audit(trace, delta, L, tau):
    """
    Count support changes and compare with 2*(phi(x^0) - phi_final)/(delta^2*(1/tau - L)).
    Also lists support changes at k >= 1 whose step does not exceed delta and
    iterates k >= 1 holding a nonzero coordinate smaller than delta.
    """
    records = trace.records
    changes = trace.support_changes()
    delta_value = delta.delta
    coefficient = 1.0 / tau - L
    if coefficient > 0 and records:
        drop = max(records[0].phi - records[-1].phi, 0.0)
        bound = 2.0 * drop / (delta_value ** 2 * coefficient)
    else:
        bound = math.inf
    by_k = {r.k: r for r in records}
    short_steps = [k for k in changes if k >= 1 and by_k[k].step_norm <= delta_value]
    small = [r.k for r in records if r.k >= 1 and r.min_abs_nonzero < delta_value]
    return SupportAudit(
        change_count=len(changes),
        bound=bound,
        within_bound=len(changes) <= bound,
        approximate=trace.termination_status is TerminationStatus.MAX_ITERATIONS,
        short_step_changes=short_steps,
        small_magnitude_iterates=small,
    )
