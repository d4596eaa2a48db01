from rest_framework import serializers

from core.config import OPTION_KEYS, solver_config
from core.harness.regularization import METHODS
from core.harness.suites import INITIAL_POINTS, suite_configurations
from core.models import BenchmarkSuite, ProblemInstance, SolveRun


class FileUrlMixin:
    def get_file_url(self, obj):
        if obj.file:
            request = self.context.get('request')
            if request:
                return request.build_absolute_uri(obj.file.url)
        return None


class ProblemInstanceSerializer(FileUrlMixin, serializers.ModelSerializer):
    file_url = serializers.SerializerMethodField()

    class Meta:
        model = ProblemInstance
        fields = ['id', 'name', 'n', 'm', 'w', 's', 'sigma', 'seed', 'box_magnitude', 'file_url', 'created_at']
        read_only_fields = fields


class SolveRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = SolveRun
        fields = [
            'id', 'suite', 'instance', 'n', 'm', 's', 'w', 'sigma', 'seed',
            'lam', 'mu', 'tau', 'x0', 'box', 'method', 'iterations', 'time_s',
            'err', 'psnr', 'phi_final', 'support_changes', 'status', 'success', 'created_at'
        ]
        read_only_fields = fields


class BenchmarkSuiteSerializer(FileUrlMixin, serializers.ModelSerializer):
    requested_by_username = serializers.CharField(source='requested_by.username', read_only=True, default=None)
    file_url = serializers.SerializerMethodField()
    run_count = serializers.IntegerField(source='runs.count', read_only=True)

    class Meta:
        model = BenchmarkSuite
        fields = [
            'id', 'suite_name', 'parameters', 'repetitions', 'base_seed', 'auto_reg',
            'status', 'file_url', 'note', 'requested_by_username', 'run_count',
            'created_at', 'finished_at'
        ]
        read_only_fields = ['id', 'status', 'file_url', 'note', 'requested_by_username', 'run_count', 'created_at', 'finished_at']

    def validate_parameters(self, value):
        if not isinstance(value, dict):
            raise serializers.ValidationError("Parameters must be an object.")
        unknown = set(value) - {'ranges', 'solver', 'threads', 'audit'}
        if unknown:
            raise serializers.ValidationError(f"Unknown parameters: {', '.join(sorted(unknown))}")
        ranges = value.get('ranges') or {}
        if not isinstance(ranges, dict) or not all(isinstance(v, list) for v in ranges.values()):
            raise serializers.ValidationError("Ranges must map range names to lists of values.")
        solver = value.get('solver') or {}
        if not isinstance(solver, dict) or set(solver) - set(OPTION_KEYS):
            raise serializers.ValidationError(f"Solver options must be a subset of: {', '.join(OPTION_KEYS)}")
        try:
            solver_config(solver)
        except (ValueError, TypeError) as e:
            raise serializers.ValidationError(str(e))
        threads = value.get('threads', 1)
        if not isinstance(threads, int) or threads < 1:
            raise serializers.ValidationError("Threads must be a positive integer.")
        return value

    def validate(self, attrs):
        ranges = (attrs.get('parameters') or {}).get('ranges')
        try:
            suite_configurations(attrs['suite_name'], ranges)
        except (ValueError, TypeError) as e:
            raise serializers.ValidationError({'parameters': str(e)})
        return attrs

    def create(self, validated_data):
        validated_data['requested_by'] = self.context['request'].user
        return super().create(validated_data)


class SolveRequestSerializer(serializers.Serializer):
    """Solver overrides accepted by POST /api/instances/<id>/solve/."""
    lam = serializers.FloatField(required=False)
    mu = serializers.FloatField(required=False)
    tau = serializers.FloatField(required=False)
    tau_fraction = serializers.FloatField(required=False)
    max_iterations = serializers.IntegerField(required=False)
    rel_change_tol = serializers.FloatField(required=False)
    objective_target = serializers.FloatField(required=False)
    x0 = serializers.ChoiceField(choices=INITIAL_POINTS, required=False)
    method = serializers.ChoiceField(choices=METHODS, required=False)

    def validate(self, attrs):
        unknown = set(self.initial_data) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(f"Unknown options: {', '.join(sorted(unknown))}")
        try:
            solver_config({key: value for key, value in attrs.items() if key in OPTION_KEYS})
        except (ValueError, TypeError) as e:
            raise serializers.ValidationError(str(e))
        return attrs
