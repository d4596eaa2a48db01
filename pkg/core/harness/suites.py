"""
Benchmark suites: sweeps over generated instances, one result row per run.

Every (configuration, repetition) pair gets its instance seed from
numpy's SeedSequence keyed on the instance shape and the repetition, so runs
that differ only in method, initial point or box share the same instance.
"""
import itertools
import logging
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core.numerics.exceptions import InstanceError, ParameterError
from core.numerics.model import TerminationStatus
from core.numerics.oracle import so_point_check
from core.numerics.prox import compute_delta
from core.numerics.solver import (
    SolverConfig,
    check_tau_stationary,
    solve,
    support_change_audit,
    verify_sufficient_decrease,
)

from .formats import read_vector, write_results_csv
from .instances import gen_e1
from .metrics import is_success, metric_err, metric_psnr
from .regularization import METHODS, apply_method, tune_regularization

logger = logging.getLogger(__name__)

INITIAL_POINTS = ('zeros', 'ones', 'neg-ones', 'randn')
# repetition slot reserved for the auto-reg pilot instance
PILOT_REPETITION = 2 ** 31 - 1


@dataclass
class RunRecord:
    n: int
    m: int
    s: int
    w: int
    sigma: float
    seed: int
    lam: float
    mu: float
    tau: float
    x0: str
    box: str
    iterations: int
    time_s: float
    err: float
    psnr: float
    phi_final: float
    support_changes: int
    status: str
    method: str = 'sgb'
    # audit outcomes; None when the audit was not run
    decrease_ok: Optional[bool] = None
    support_audit_passed: Optional[bool] = None
    stationary: Optional[bool] = None
    so_point: Optional[bool] = None
    warnings: list = field(default_factory=list)
    x_final: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    trace: Optional[object] = field(default=None, repr=False, compare=False)

    @property
    def success(self):
        return is_success(self.err)

    def as_dict(self):
        return {
            'n': self.n,
            'm': self.m,
            's': self.s,
            'w': self.w,
            'sigma': float(self.sigma),
            'seed': self.seed,
            'lambda': float(self.lam),
            'mu': float(self.mu),
            'tau': float(self.tau),
            'x0': self.x0,
            'box': self.box,
            'iters': self.iterations,
            'time_s': float(self.time_s),
            'err': float(self.err),
            'psnr': float(self.psnr),
            'phi_final': float(self.phi_final),
            'support_changes': self.support_changes,
            'status': self.status,
            'success': self.success,
        }


def initial_point(kind, n, seed=0):
    """
    zeros, ones, neg-ones, randn (seeded) or file:PATH holding a vector of length n.
    """
    if kind == 'zeros':
        return np.zeros(n)
    if kind == 'ones':
        return np.ones(n)
    if kind == 'neg-ones':
        return -np.ones(n)
    if kind == 'randn':
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        return rng.standard_normal(n)
    if kind.startswith('file:'):
        vector = read_vector(kind[len('file:'):])
        if vector.size != n:
            raise InstanceError(f"Initial point file holds {vector.size} values, expected {n}")
        return vector
    raise ParameterError(f"Unknown initial point '{kind}'")


def run_instance(instance, config, x0='zeros', method='sgb', audit=True, box=None, x0_seed=None):
    """
    Solve one instance and score it. With `audit` the trace is recorded and the
    run is checked for sufficient decrease, the support-change bound and
    stationarity at termination. A randn start draws from `x0_seed`, or from the
    instance seed when it is None.
    """
    config = apply_method(config, method)
    config = replace(config, record_trace=audit)
    box = box or instance.box
    objective = instance.objective()
    x_init = initial_point(x0, instance.n, instance.seed if x0_seed is None else x0_seed)

    start = time.perf_counter()
    x, trace = solve(objective, config, box, instance.partition, x_init)
    elapsed = time.perf_counter() - start

    L = objective.smoothness_constant
    params = config.params_for(L)
    record = RunRecord(
        n=instance.n,
        m=instance.m,
        s=instance.s,
        w=instance.w,
        sigma=instance.sigma,
        seed=instance.seed,
        lam=config.lam,
        mu=config.mu,
        tau=params.tau,
        x0=x0,
        box=box.label(),
        iterations=trace.iterations,
        time_s=elapsed,
        err=metric_err(x, instance.x_star),
        psnr=metric_psnr(x, instance.x_star),
        phi_final=trace.final_phi,
        support_changes=trace.support_change_count,
        status=str(trace.termination_status),
        method=method,
        warnings=list(trace.warnings),
        x_final=x,
        trace=trace,
    )
    if audit:
        _audit(record, trace, objective, params, box, instance.partition, config)
    return record


def _audit(record, trace, objective, params, box, partition, config):
    L = objective.smoothness_constant
    if params.satisfies_step_condition(L):
        record.decrease_ok = bool(verify_sufficient_decrease(trace, L, params.tau))
        if params.lam > 0 and not box.forced_zero().all():
            delta = compute_delta(box, params.lam, params.tau)
            record.support_audit_passed = support_change_audit(trace, delta, L, params.tau).passed
    if trace.termination_status is TerminationStatus.RELATIVE_CHANGE:
        x = trace.final_iterate
        record.stationary = check_tau_stationary(x, objective, params, box, partition, config.audit_tol)
        record.so_point = so_point_check(x, objective, box, config.audit_tol, tau=params.tau)
    if record.decrease_ok is False or record.support_audit_passed is False:
        logger.warning(
            f"Audit failed for seed {record.seed} (n={record.n}, method={record.method}): "
            f"decrease={record.decrease_ok} support={record.support_audit_passed}"
        )


@dataclass(frozen=True)
class SuiteConfiguration:
    n: int
    m: int
    s: int
    w: int
    sigma: float
    box_magnitude: float
    x0: str
    method: str

    @property
    def instance_key(self):
        return (self.n, self.m, self.w, self.s)

    def __str__(self):
        return (
            f"n={self.n} m={self.m} s={self.s} w={self.w} sigma={self.sigma:g} "
            f"box={self.box_magnitude:g} x0={self.x0} method={self.method}"
        )


# Desk-scale defaults. Ratios are relative to n; s is rounded to a multiple of w.
SUITES = {
    'dims': {
        'n': [1000, 2000],
        'm_ratio': [0.25],
        's_ratio': [0.05],
        'w': [4],
        'sigma': [0.01],
        'box': [5.0],
        'x0': ['zeros'],
        'method': ['sgb'],
    },
    'inits': {
        'n': [1000],
        'm_ratio': [0.25],
        's_ratio': [0.05],
        'w': [4],
        'sigma': [0.01],
        'box': [5.0],
        'x0': ['zeros', 'neg-ones', 'ones', 'randn'],
        'method': ['sgb'],
    },
    'boxes': {
        'n': [1000],
        'm_ratio': [0.5],
        's_ratio': [0.01, 0.05, 0.10, 0.14, 0.17],
        'w': [4],
        'sigma': [0.001],
        'box': [5.0, 6.0, 10.0],
        'x0': ['zeros'],
        'method': ['sgb'],
    },
    'group_sizes': {
        'n': [960],
        'm_ratio': [0.5],
        's_ratio': [0.14],
        'w': [2, 4, 8, 16, 32],
        'sigma': [0.001],
        'box': [5.0],
        'x0': ['zeros'],
        'method': ['piht', 'sgb'],
    },
    'sparsity': {
        'n': [1000],
        'm_ratio': [0.5],
        's_ratio': [0.01, 0.05, 0.10, 0.14, 0.17],
        'w': [4],
        'sigma': [0.001],
        'box': [5.0],
        'x0': ['zeros'],
        'method': ['piht', 'sgb'],
    },
}


def _sparsity(n, ratio, w):
    return w * max(1, int(round(ratio * n / w)))


def suite_configurations(suite_name, ranges=None):
    if suite_name not in SUITES:
        raise ParameterError(f"Unknown suite '{suite_name}', expected one of {', '.join(SUITES)}")
    axes = dict(SUITES[suite_name])
    for key, values in (ranges or {}).items():
        if key not in axes:
            raise ParameterError(f"Suite '{suite_name}' has no range '{key}'")
        values = list(values)
        if not values:
            raise ParameterError(f"Range '{key}' is empty")
        axes[key] = values
    for method in axes['method']:
        if method not in METHODS:
            raise ParameterError(f"Unknown method '{method}'")

    configurations = []
    for n, m_ratio, s_ratio, w, sigma, box, x0, method in itertools.product(
        axes['n'], axes['m_ratio'], axes['s_ratio'], axes['w'],
        axes['sigma'], axes['box'], axes['x0'], axes['method'],
    ):
        n, w = int(n), int(w)
        if n % w != 0:
            raise InstanceError(f"Group width {w} does not divide n={n}")
        configurations.append(SuiteConfiguration(
            n=n,
            m=max(1, int(round(m_ratio * n))),
            s=min(_sparsity(n, s_ratio, w), n),
            w=w,
            sigma=float(sigma),
            box_magnitude=float(box),
            x0=str(x0),
            method=str(method),
        ))
    return configurations


def instance_seed(base_seed, configuration, repetition):
    sequence = np.random.SeedSequence(base_seed, spawn_key=(*configuration.instance_key, repetition))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _instance_group(configuration):
    return (*configuration.instance_key, configuration.sigma, configuration.box_magnitude)


def _instance_for(configuration, seed):
    return gen_e1(
        configuration.n,
        configuration.m,
        configuration.w,
        configuration.s,
        configuration.sigma,
        configuration.box_magnitude,
        seed,
    )


def run_suite(suite_name, ranges=None, repetitions=1, output_path=None, base_seed=0, threads=1,
              config=None, auto_reg=False, audit=True):
    """
    Run every configuration of the suite `repetitions` times and return the
    RunRecords in configuration order. Rows are written to `output_path` as CSV
    by the calling thread once all runs finish.
    """
    if repetitions < 1:
        raise ParameterError(f"repetitions must be at least 1, got {repetitions}")
    if threads < 1:
        raise ParameterError(f"threads must be at least 1, got {threads}")
    config = config or SolverConfig()
    configurations = suite_configurations(suite_name, ranges)
    logger.info(f"Suite {suite_name}: {len(configurations)} configurations x {repetitions} repetitions")
    if threads > 1:
        logger.warning(f"Running with {threads} threads; time_s values are not from exclusive runs")

    run_configs = [config] * len(configurations)
    if auto_reg:
        tuned = {}
        pilots = {}
        for index, configuration in enumerate(configurations):
            # one pair per instance, start point and method
            key = (_instance_group(configuration), configuration.x0, configuration.method)
            if key not in tuned:
                group = _instance_group(configuration)
                if group not in pilots:
                    pilots[group] = _instance_for(configuration, instance_seed(base_seed, configuration, PILOT_REPETITION))
                pilot = pilots[group]
                result = tune_regularization(
                    pilot,
                    config,
                    x0=initial_point(configuration.x0, pilot.n, pilot.seed),
                    method=configuration.method,
                )
                tuned[key] = (result.lam, result.mu)
            lam, mu = tuned[key]
            run_configs[index] = replace(config, lam=lam, mu=mu)

    # one job per generated instance; every x0 and method sharing it runs on the same arrays
    groups = OrderedDict()
    for index, configuration in enumerate(configurations):
        groups.setdefault(_instance_group(configuration), []).append(index)
    jobs = [(indices, repetition) for indices in groups.values() for repetition in range(repetitions)]

    def run_job(job):
        indices, repetition = job
        instance = _instance_for(configurations[indices[0]], instance_seed(base_seed, configurations[indices[0]], repetition))
        results = []
        for index in indices:
            configuration = configurations[index]
            record = run_instance(
                instance, run_configs[index], x0=configuration.x0, method=configuration.method, audit=audit
            )
            logger.info(f"{suite_name} [{configuration}] rep {repetition}: err={record.err:.3e} iters={record.iterations}")
            # keep rows light; arrays are not needed once scored
            record.trace = None
            record.x_final = None
            results.append(((index, repetition), record))
        return results

    if threads == 1:
        finished = [run_job(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            finished = list(executor.map(run_job, jobs))
    by_slot = dict(pair for results in finished for pair in results)
    records = [by_slot[(index, repetition)] for index in range(len(configurations)) for repetition in range(repetitions)]

    if output_path is not None:
        write_results_csv(output_path, records)
    return records


def summarize_runs(records):
    """
    Success rate, mean err, mean iterations and mean time per configuration
    and method, in first-seen order.
    """
    groups = OrderedDict()
    for record in records:
        key = (record.n, record.m, record.s, record.w, record.sigma, record.box, record.x0, record.method)
        groups.setdefault(key, []).append(record)

    summary = []
    for (n, m, s, w, sigma, box, x0, method), rows in groups.items():
        summary.append({
            'n': n,
            'm': m,
            's': s,
            'w': w,
            'sigma': sigma,
            'box': box,
            'x0': x0,
            'method': method,
            'runs': len(rows),
            'success_rate': sum(r.success for r in rows) / len(rows),
            'mean_err': float(np.mean([r.err for r in rows])),
            'mean_iters': float(np.mean([r.iterations for r in rows])),
            'mean_time_s': float(np.mean([r.time_s for r in rows])),
        })
    return summary
