from django.db import models

from instances.problem import ClassTag


class ExperimentRun(models.Model):
    """
    One pipeline run: its config, seed and output directory. Runs are
    resumed by name.
    """
    STATUS_CHOICES = [
        ('running', 'Running'),
        ('done', 'Done'),
        ('failed', 'Failed'),
    ]

    name = models.SlugField(max_length=100, unique=True)
    class_tag = models.CharField(max_length=20, choices=ClassTag.choices)
    seed = models.IntegerField(default=0)
    config = models.JSONField()
    output_dir = models.CharField(max_length=500)
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default='running')
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f'{self.name} | {self.class_tag} | seed {self.seed} | {self.status}'


class StageCheckpoint(models.Model):
    """A finished stage; valid while its artefact still hashes to `digest`."""
    STAGE_CHOICES = [
        ('gen', 'Generate datasets'),
        ('table', 'Reward table'),
        ('restrict', 'Subspace restriction'),
        ('train', 'Forward training'),
        ('evaluate', 'Evaluation'),
        ('report', 'Report'),
    ]

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='checkpoints')
    stage = models.CharField(max_length=10, choices=STAGE_CHOICES)
    path = models.CharField(max_length=500)
    digest = models.CharField(max_length=64)
    seed = models.IntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        unique_together = ('run', 'stage')
        ordering = ['run', 'created_at']

    def __str__(self):
        return f'{self.run.name} | {self.stage} | {self.digest[:12]}'
