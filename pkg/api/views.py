from rest_framework import viewsets, mixins, status
from rest_framework.decorators import action
from rest_framework.response import Response
from django.db.models import Q
from django.http import FileResponse, Http404
from core.models import BenchmarkSuite, ProblemInstance, SolveRun
from core.tasks import run_benchmark_suite, solve_problem_instance
from .serializers import (
    BenchmarkSuiteSerializer,
    ProblemInstanceSerializer,
    SolveRequestSerializer,
    SolveRunSerializer,
)
import logging

logger = logging.getLogger(__name__)


class ProblemInstanceViewSet(viewsets.ReadOnlyModelViewSet):
    """
    API endpoint for viewing stored instances.
    """
    serializer_class = ProblemInstanceSerializer
    queryset = ProblemInstance.objects.all()

    @action(detail=True, methods=['post'], url_path='solve')
    def solve(self, request, pk=None):
        """
        Queue a solve of this instance.
        POST /api/instances/<id>/solve/
        Body: optional solver overrides, e.g. {"lam": 0.01, "mu": 0.01, "x0": "zeros"}
        """
        problem = self.get_object()
        serializer = SolveRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        solve_problem_instance.delay(problem.id, dict(serializer.validated_data))
        logger.info(f"Instance {problem.id} queued for solving by {request.user.username}")
        return Response(
            {'message': f'Instance {problem.id} queued for solving'},
            status=status.HTTP_202_ACCEPTED
        )


class SolveRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    API endpoint for viewing solver runs.
    Filters: ?suite=<id>, ?instance=<id>
    """
    serializer_class = SolveRunSerializer

    def get_queryset(self):
        """Staff see every run; others see instance runs and runs of their own suites."""
        qs = SolveRun.objects.select_related('suite', 'instance')
        user = self.request.user
        if not user.is_staff:
            qs = qs.filter(Q(suite__isnull=True) | Q(suite__requested_by=user))
        suite_id = self.request.query_params.get('suite')
        if suite_id:
            qs = qs.filter(suite_id=suite_id)
        instance_id = self.request.query_params.get('instance')
        if instance_id:
            qs = qs.filter(instance_id=instance_id)
        return qs


class BenchmarkSuiteViewSet(mixins.CreateModelMixin, viewsets.ReadOnlyModelViewSet):
    """
    API endpoint for queueing, viewing and downloading benchmark suites.
    """
    serializer_class = BenchmarkSuiteSerializer

    def get_queryset(self):
        """Staff see every suite; others see their own."""
        qs = BenchmarkSuite.objects.select_related('requested_by')
        if self.request.user.is_staff:
            return qs
        return qs.filter(requested_by=self.request.user)

    def perform_create(self, serializer):
        """Create the suite and queue it."""
        suite = serializer.save()
        run_benchmark_suite.delay(suite.id)
        logger.info(f"Suite {suite.id} ({suite.suite_name}) created and queued")

    @action(detail=True, methods=['post'], url_path='rerun')
    def rerun(self, request, pk=None):
        """
        Re-run a finished or failed suite.
        POST /api/suites/<id>/rerun/
        """
        suite = self.get_object()

        if suite.status in ('pending', 'running'):
            return Response(
                {'error': f'Suite is still {suite.status}'},
                status=status.HTTP_400_BAD_REQUEST
            )

        suite.status = 'pending'
        suite.save()
        run_benchmark_suite.delay(suite.id)

        logger.info(f"Suite {suite.id} queued for re-run")

        return Response(
            {'message': f'Suite {suite.id} queued for re-run'},
            status=status.HTTP_200_OK
        )

    @action(detail=True, methods=['get'], url_path='download')
    def download(self, request, pk=None):
        """
        Download the result CSV.
        GET /api/suites/<id>/download/
        """
        suite = self.get_object()

        if suite.status != 'ready':
            return Response(
                {'error': f'Suite is not ready. Current status: {suite.status}'},
                status=status.HTTP_400_BAD_REQUEST
            )

        if not suite.file:
            return Response(
                {'error': 'Result file not found'},
                status=status.HTTP_404_NOT_FOUND
            )

        try:
            response = FileResponse(suite.file.open('rb'), content_type='text/csv')
            response['Content-Disposition'] = f'attachment; filename="suite_{suite.id}.csv"'
            logger.info(f"Suite {suite.id} downloaded by {request.user.username}")
            return response
        except Exception as e:
            logger.error(f"Error downloading suite {suite.id}: {str(e)}")
            raise Http404("Result file not found")
