from core.commands import L2SepCommand
from harness.models import StageCheckpoint
from harness.pipeline import STAGES, Pipeline
from harness.serializers import ExperimentConfigSerializer


class Command(L2SepCommand):
    help = 'Run the whole experiment (data, table, restriction, training, evaluation, report) with resume.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config JSON.')
        parser.add_argument('--out', help='Run directory; defaults to L2SEP OUTPUT_DIR/<name>.')
        parser.add_argument('--jobs', type=int)
        parser.add_argument('--restart-from', choices=STAGES,
                            help='Drop the checkpoints of this stage and every later one.')

    def execute_command(self, *args, **options):
        config = self.validated(ExperimentConfigSerializer, self.load_json(options['config'], 'config'),
                                'experiment config')
        pipeline = Pipeline(config, options['out'], options['jobs'])
        if options['restart_from']:
            run = pipeline.start()
            dropped = STAGES[STAGES.index(options['restart_from']):]
            StageCheckpoint.objects.filter(run=run, stage__in=dropped).delete()
        report_dir = pipeline.run_all()
        self.stdout.write(self.style.SUCCESS(f'Report written to {report_dir}'))
