import io
import logging

from celery import shared_task
from django.core.files.base import ContentFile
from django.db import transaction
from django.utils import timezone

from .config import solver_config
from .harness.formats import instance_from_bytes, write_results
from .harness.suites import run_instance, run_suite
from .models import BenchmarkSuite, ProblemInstance, SolveRun

logger = logging.getLogger(__name__)


@shared_task
def run_benchmark_suite(suite_id):
    """
    Run a queued benchmark suite:
    1. Mark as running
    2. Run every configuration and repetition
    3. Store the result CSV and one SolveRun per row
    4. Mark as ready (or failed with the error in `note`)
    """
    try:
        suite = BenchmarkSuite.objects.get(id=suite_id)
        suite.status = 'running'
        suite.note = ''
        suite.save()
        logger.info(f"Suite {suite_id} ({suite.suite_name}) started")

        parameters = suite.parameters or {}
        config = solver_config(parameters.get('solver'), record_trace=False)
        records = run_suite(
            suite.suite_name,
            ranges=parameters.get('ranges'),
            repetitions=suite.repetitions,
            base_seed=suite.base_seed,
            threads=int(parameters.get('threads', 1)),
            config=config,
            auto_reg=suite.auto_reg,
            audit=parameters.get('audit', True),
        )

        buffer = io.StringIO()
        write_results(buffer, records)
        with transaction.atomic():
            # re-runs replace earlier rows
            suite.runs.all().delete()
            SolveRun.objects.bulk_create([SolveRun.from_record(r, suite=suite) for r in records])
            suite.file.save(f'suite_{suite.id}_{suite.suite_name}.csv', ContentFile(buffer.getvalue().encode('utf-8')), save=False)
            suite.status = 'ready'
            suite.finished_at = timezone.now()
            suite.save()

        successes = sum(r.success for r in records)
        logger.info(f"Suite {suite_id} finished: {len(records)} runs, {successes} successful")
        return f"Suite {suite_id} finished with {len(records)} runs"

    except BenchmarkSuite.DoesNotExist:
        logger.error(f"BenchmarkSuite with ID {suite_id} not found")
        return f"Suite {suite_id} not found"
    except Exception as e:
        logger.error(f"Error running suite {suite_id}: {str(e)}")
        BenchmarkSuite.objects.filter(id=suite_id).update(
            status='failed', note=str(e), finished_at=timezone.now()
        )
        return f"Error: {str(e)}"


@shared_task
def solve_problem_instance(instance_id, options=None):
    """
    Solve a stored instance. `options` holds solver overrides plus optional
    `x0` and `method`.
    """
    options = options or {}
    try:
        problem = ProblemInstance.objects.get(id=instance_id)
        with problem.file.open('rb') as handle:
            data = handle.read()
        # instance files do not carry sigma
        instance = instance_from_bytes(data, sigma=problem.sigma if problem.sigma is not None else float('nan'))

        record = run_instance(
            instance,
            solver_config(options),
            x0=options.get('x0', 'zeros'),
            method=options.get('method', 'sgb'),
        )
        run = SolveRun.from_record(record, instance=problem)
        run.save()
        logger.info(f"Instance {instance_id} solved: run {run.id}, err={record.err:.3e}, status={record.status}")
        return f"Instance {instance_id} solved in run {run.id}"

    except ProblemInstance.DoesNotExist:
        logger.error(f"ProblemInstance with ID {instance_id} not found")
        return f"Instance {instance_id} not found"
    except Exception as e:
        logger.error(f"Error solving instance {instance_id}: {str(e)}")
        return f"Error: {str(e)}"
