import math

from core.commands import L2SepCommand
from core.exceptions import ConfigurationError
from harness.pipeline import read_evaluation, read_subspace
from harness.report import write_report
from subspace.table import read_table


class Command(L2SepCommand):
    help = 'Write results tables, selection frequencies, the subspace heatmap and trade-off curves.'

    def add_arguments(self, parser):
        parser.add_argument('--evaluation', required=True, help='evaluation.json of a run.')
        parser.add_argument('--subspace', help='Subspace JSON for the heatmap.')
        parser.add_argument('--table', help='Reward table for the trade-off curves.')
        parser.add_argument('--thresholds', default='-inf,0',
                            help='Comma-separated filter values for the trade-off curves.')
        parser.add_argument('--size', type=int, default=12)
        parser.add_argument('--out', required=True)

    def execute_command(self, *args, **options):
        evaluation = read_evaluation(options['evaluation'])
        subspace = read_subspace(options['subspace']).configs if options['subspace'] else None
        table = read_table(options['table']) if options['table'] else None
        try:
            thresholds = [float(value) for value in options['thresholds'].split(',')]
        except ValueError as exc:
            raise ConfigurationError(f'Invalid thresholds {options["thresholds"]!r}.') from exc
        if any(math.isnan(value) for value in thresholds):
            raise ConfigurationError('Thresholds cannot be NaN.')
        written = write_report(evaluation.results, options['out'], evaluation.objective, subspace, table,
                               thresholds, options['size'])
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(written)} report files to {options["out"]}'))
