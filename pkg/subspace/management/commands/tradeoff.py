from core.commands import L2SepCommand
from core.exceptions import ConfigurationError
from subspace.restriction import tradeoff_curve
from subspace.table import read_table


class Command(L2SepCommand):
    help = 'Trade-off curves of training performance against the filter threshold, as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--table', required=True)
        parser.add_argument('--thresholds', required=True,
                            help='Comma-separated thresholds, e.g. --thresholds=-inf,-0.2,0,0.1')
        parser.add_argument('--size', type=int, default=12)
        parser.add_argument('--out', help='CSV path; default is stdout.')

    def execute_command(self, *args, **options):
        try:
            thresholds = [float(value) for value in options['thresholds'].split(',')]
        except ValueError as exc:
            raise ConfigurationError(f'Invalid thresholds: {exc}') from exc
        frame = tradeoff_curve(read_table(options['table']), thresholds, options['size'])
        if options['out']:
            frame.to_csv(options['out'], index=False)
        else:
            self.stdout.write(frame.to_csv(index=False))
