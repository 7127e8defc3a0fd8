# Generated by Django 4.2.16 on 2026-10-18 09:00

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.SlugField(max_length=100, unique=True)),
                ('class_tag', models.CharField(choices=[('packing', 'Packing'), ('bin_packing', 'Binary packing'), ('max_cut', 'Maximum cut'), ('comb_auction', 'Combinatorial auction'), ('indep_set', 'Independent set'), ('custom', 'Custom')], max_length=20)),
                ('seed', models.IntegerField(default=0)),
                ('config', models.JSONField()),
                ('output_dir', models.CharField(max_length=500)),
                ('status', models.CharField(choices=[('running', 'Running'), ('done', 'Done'), ('failed', 'Failed')], default='running', max_length=10)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='StageCheckpoint',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('stage', models.CharField(choices=[('gen', 'Generate datasets'), ('table', 'Reward table'), ('restrict', 'Subspace restriction'), ('train', 'Forward training'), ('evaluate', 'Evaluation'), ('report', 'Report')], max_length=10)),
                ('path', models.CharField(max_length=500)),
                ('digest', models.CharField(max_length=64)),
                ('seed', models.IntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='checkpoints', to='harness.experimentrun')),
            ],
            options={
                'ordering': ['run', 'created_at'],
                'unique_together': {('run', 'stage')},
            },
        ),
    ]
