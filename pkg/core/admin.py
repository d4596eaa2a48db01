from django.contrib import admin
from django.http import HttpResponse
from django.utils.html import format_html

from .harness.formats import write_results
from .models import BenchmarkSuite, ProblemInstance, SolveRun
from .tasks import run_benchmark_suite, solve_problem_instance


@admin.register(ProblemInstance)
class ProblemInstanceAdmin(admin.ModelAdmin):
    list_display = ('name', 'n', 'm', 'w', 's', 'sigma', 'seed', 'box_magnitude', 'created_at')
    list_filter = ('n', 'w', 'created_at')
    search_fields = ('name',)
    readonly_fields = ('created_at',)
    actions = ['solve_selected_instances']

    def solve_selected_instances(self, request, queryset):
        """Queue a solve with the default settings for every selected instance."""
        count = 0
        for problem in queryset:
            solve_problem_instance.delay(problem.id, {})
            count += 1
        self.message_user(request, f"{count} instances queued for solving.")
    solve_selected_instances.short_description = "Solve selected instances (Celery)"


class SolveRunInline(admin.TabularInline):
    model = SolveRun
    extra = 0
    can_delete = False
    fields = ('seed', 'method', 'x0', 'box', 'lam', 'mu', 'iterations', 'err', 'success', 'status')
    readonly_fields = fields
    show_change_link = True


@admin.register(BenchmarkSuite)
class BenchmarkSuiteAdmin(admin.ModelAdmin):
    list_display = ('id', 'suite_name', 'repetitions', 'auto_reg', 'status', 'requested_by', 'created_at', 'download_link')
    list_filter = ('suite_name', 'status', 'auto_reg', 'created_at')
    search_fields = ('note', 'requested_by__username')
    readonly_fields = ('status', 'file', 'note', 'created_at', 'updated_at', 'finished_at')
    inlines = (SolveRunInline,)
    actions = ['rerun_suites']

    def download_link(self, obj):
        if obj.file:
            return format_html('<a href="{}" download>Download</a>', obj.file.url)
        return '-'
    download_link.short_description = 'File'

    def save_model(self, request, obj, form, change):
        """Record the requesting user and queue new suites."""
        if not change:
            obj.requested_by = request.user
        super().save_model(request, obj, form, change)
        if not change:
            run_benchmark_suite.delay(obj.id)
            self.message_user(request, f"Suite queued for running. Suite ID: {obj.id}")

    def rerun_suites(self, request, queryset):
        """Re-run finished or failed suites."""
        suites = queryset.exclude(status__in=['pending', 'running'])
        count = 0
        for suite in suites:
            suite.status = 'pending'
            suite.save()
            run_benchmark_suite.delay(suite.id)
            count += 1
        self.message_user(request, f"{count} suites queued for re-run.")
    rerun_suites.short_description = "Re-run selected suites"


@admin.register(SolveRun)
class SolveRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'n', 'm', 's', 'w', 'seed', 'method', 'x0', 'box', 'iterations', 'err', 'success', 'status')
    list_filter = ('method', 'success', 'status', 'box', 'suite')
    search_fields = ('seed', 'suite__suite_name', 'instance__name')
    readonly_fields = ('created_at',)
    actions = ['export_selected_runs']

    def export_selected_runs(self, request, queryset):
        """Download the selected runs as a result CSV."""
        response = HttpResponse(content_type='text/csv')
        response['Content-Disposition'] = 'attachment; filename="runs.csv"'
        write_results(response, [run.to_record() for run in queryset.order_by('id')])
        return response
    export_selected_runs.short_description = "Export selected runs as CSV"
