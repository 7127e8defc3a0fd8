from core.commands import L2SepCommand
from harness.pipeline import Pipeline
from harness.serializers import ExperimentConfigSerializer


class Command(L2SepCommand):
    help = 'Evaluate the trained nets and every baseline on the test split of a run directory.'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config JSON.')
        parser.add_argument('--out', help='Run directory holding data, subspace and nets.')
        parser.add_argument('--jobs', type=int)

    def execute_command(self, *args, **options):
        config = self.validated(ExperimentConfigSerializer, self.load_json(options['config'], 'config'),
                                'experiment config')
        pipeline = Pipeline(config, options['out'], options['jobs'])
        pipeline.start()
        pipeline.stage_evaluate()
        pipeline.record('evaluate')
        self.stdout.write(self.style.SUCCESS(f'Wrote {pipeline.artefact("evaluate")}'))
