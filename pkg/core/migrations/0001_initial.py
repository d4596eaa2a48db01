# Generated by Django 4.2.27 on 2026-10-18 10:12

from django.conf import settings
import django.core.validators
from django.db import migrations, models
import django.db.models.deletion
import core.models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        migrations.swappable_dependency(settings.AUTH_USER_MODEL),
    ]

    operations = [
        migrations.CreateModel(
            name='BenchmarkSuite',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('suite_name', models.CharField(choices=[('dims', 'Dimensions'), ('inits', 'Initial points'), ('boxes', 'Boxes'), ('group_sizes', 'Group sizes'), ('sparsity', 'Sparsity levels')], max_length=20)),
                ('parameters', models.JSONField(blank=True, default=dict, help_text='Range overrides and solver settings')),
                ('repetitions', models.IntegerField(default=1, validators=[django.core.validators.MinValueValidator(1)])),
                ('base_seed', models.BigIntegerField(default=0)),
                ('auto_reg', models.BooleanField(default=False, help_text='Tune lambda and mu on a pilot instance')),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('ready', 'Ready'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('file', models.FileField(blank=True, null=True, upload_to=core.models.bench_upload_path)),
                ('note', models.TextField(blank=True, help_text='Failure message or comments')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
                ('requested_by', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='suites', to=settings.AUTH_USER_MODEL)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ProblemInstance',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=255)),
                ('n', models.IntegerField(validators=[django.core.validators.MinValueValidator(1)])),
                ('m', models.IntegerField(validators=[django.core.validators.MinValueValidator(1)])),
                ('w', models.IntegerField(help_text='Group width', validators=[django.core.validators.MinValueValidator(1)])),
                ('s', models.IntegerField(help_text='Number of nonzeros in the ground truth', validators=[django.core.validators.MinValueValidator(0)])),
                ('sigma', models.FloatField(blank=True, help_text='Noise level; empty when unknown', null=True)),
                ('seed', models.BigIntegerField()),
                ('box_magnitude', models.FloatField(blank=True, help_text='Empty for non-symmetric boxes', null=True)),
                ('file', models.FileField(upload_to='instances/')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('created_by', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='instances', to=settings.AUTH_USER_MODEL)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SolveRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('n', models.IntegerField()),
                ('m', models.IntegerField()),
                ('s', models.IntegerField()),
                ('w', models.IntegerField()),
                ('sigma', models.FloatField(blank=True, null=True)),
                ('seed', models.BigIntegerField()),
                ('lam', models.FloatField()),
                ('mu', models.FloatField()),
                ('tau', models.FloatField()),
                ('x0', models.CharField(default='zeros', max_length=255)),
                ('box', models.CharField(max_length=50)),
                ('method', models.CharField(default='sgb', max_length=10)),
                ('iterations', models.IntegerField()),
                ('time_s', models.FloatField()),
                ('err', models.FloatField()),
                ('psnr', models.FloatField(blank=True, help_text='Empty when the recovery is exact', null=True)),
                ('phi_final', models.FloatField()),
                ('support_changes', models.IntegerField(default=0)),
                ('status', models.CharField(max_length=20)),
                ('success', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('instance', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='runs', to='core.probleminstance')),
                ('suite', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='runs', to='core.benchmarksuite')),
            ],
            options={
                'ordering': ['created_at', 'id'],
            },
        ),
    ]
