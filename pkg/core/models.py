import math

from django.conf import settings
from django.contrib.auth.models import User
from django.core.validators import MinValueValidator
from django.db import models


def bench_upload_path(instance, filename):
    return f'{settings.BENCH_OUTPUT_DIR}/{filename}'


def _finite_or_none(value):
    if value is None or not math.isfinite(value):
        return None
    return float(value)


class ProblemInstance(models.Model):
    """
    A generated recovery instance stored as a binary instance file.
    """
    name = models.CharField(max_length=255)
    n = models.IntegerField(validators=[MinValueValidator(1)])
    m = models.IntegerField(validators=[MinValueValidator(1)])
    w = models.IntegerField(validators=[MinValueValidator(1)], help_text="Group width")
    s = models.IntegerField(validators=[MinValueValidator(0)], help_text="Number of nonzeros in the ground truth")
    sigma = models.FloatField(null=True, blank=True, help_text="Noise level; empty when unknown")
    seed = models.BigIntegerField()
    box_magnitude = models.FloatField(null=True, blank=True, help_text="Empty for non-symmetric boxes")
    file = models.FileField(upload_to='instances/')
    created_by = models.ForeignKey(User, on_delete=models.SET_NULL, null=True, blank=True, related_name='instances')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.name} (n={self.n}, m={self.m}, seed={self.seed})"


class BenchmarkSuite(models.Model):
    """
    A queued or finished benchmark sweep and its result CSV.
    """
    SUITE_CHOICES = [
        ('dims', 'Dimensions'),
        ('inits', 'Initial points'),
        ('boxes', 'Boxes'),
        ('group_sizes', 'Group sizes'),
        ('sparsity', 'Sparsity levels'),
    ]
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('ready', 'Ready'),
        ('failed', 'Failed'),
    ]

    suite_name = models.CharField(max_length=20, choices=SUITE_CHOICES)
    parameters = models.JSONField(default=dict, blank=True, help_text="Range overrides and solver settings")
    repetitions = models.IntegerField(default=1, validators=[MinValueValidator(1)])
    base_seed = models.BigIntegerField(default=0)
    auto_reg = models.BooleanField(default=False, help_text="Tune lambda and mu on a pilot instance")
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')
    file = models.FileField(upload_to=bench_upload_path, null=True, blank=True)
    note = models.TextField(blank=True, help_text="Failure message or comments")
    requested_by = models.ForeignKey(User, on_delete=models.SET_NULL, null=True, blank=True, related_name='suites')
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"Suite {self.id} ({self.suite_name}) - {self.status}"


class SolveRun(models.Model):
    """
    One solver run with its settings and scores; mirrors a result CSV row.
    """
    instance = models.ForeignKey(ProblemInstance, on_delete=models.SET_NULL, null=True, blank=True, related_name='runs')
    suite = models.ForeignKey(BenchmarkSuite, on_delete=models.CASCADE, null=True, blank=True, related_name='runs')
    n = models.IntegerField()
    m = models.IntegerField()
    s = models.IntegerField()
    w = models.IntegerField()
    sigma = models.FloatField(null=True, blank=True)
    seed = models.BigIntegerField()
    lam = models.FloatField()
    mu = models.FloatField()
    tau = models.FloatField()
    x0 = models.CharField(max_length=255, default='zeros')
    box = models.CharField(max_length=50)
    method = models.CharField(max_length=10, default='sgb')
    iterations = models.IntegerField()
    time_s = models.FloatField()
    err = models.FloatField()
    psnr = models.FloatField(null=True, blank=True, help_text="Empty when the recovery is exact")
    phi_final = models.FloatField()
    support_changes = models.IntegerField(default=0)
    status = models.CharField(max_length=20)
    success = models.BooleanField(default=False)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['created_at', 'id']

    def __str__(self):
        return f"Run {self.id} n={self.n} seed={self.seed} err={self.err:.3e}"

    @classmethod
    def from_record(cls, record, instance=None, suite=None):
        """Unsaved SolveRun for a harness RunRecord."""
        return cls(
            instance=instance,
            suite=suite,
            n=record.n,
            m=record.m,
            s=record.s,
            w=record.w,
            sigma=_finite_or_none(record.sigma),
            seed=record.seed,
            lam=record.lam,
            mu=record.mu,
            tau=record.tau,
            x0=record.x0,
            box=record.box,
            method=record.method,
            iterations=record.iterations,
            time_s=record.time_s,
            err=record.err,
            psnr=_finite_or_none(record.psnr),
            phi_final=record.phi_final,
            support_changes=record.support_changes,
            status=record.status,
            success=record.success,
        )

    def to_record(self):
        from core.harness.suites import RunRecord

        return RunRecord(
            n=self.n,
            m=self.m,
            s=self.s,
            w=self.w,
            sigma=math.nan if self.sigma is None else self.sigma,
            seed=self.seed,
            lam=self.lam,
            mu=self.mu,
            tau=self.tau,
            x0=self.x0,
            box=self.box,
            iterations=self.iterations,
            time_s=self.time_s,
            err=self.err,
            psnr=math.inf if self.psnr is None else self.psnr,
            phi_final=self.phi_final,
            support_changes=self.support_changes,
            status=self.status,
            method=self.method,
        )
