import json
import math
from pathlib import Path

from core.commands import L2SepCommand
from subspace.restriction import restrict_subspace
from subspace.serializers import RestrictedSubspaceSerializer
from subspace.table import read_table


class Command(L2SepCommand):
    help = 'Greedy configuration-space restriction with instance-agnostic filtering.'

    def add_arguments(self, parser):
        parser.add_argument('--table', required=True)
        parser.add_argument('--size', type=int, default=12)
        parser.add_argument('--threshold', type=float, default=-math.inf,
                            help='Filter b; pass --threshold=-inf for greedy only.')
        parser.add_argument('--out', help='Write the subspace JSON here instead of stdout.')

    def execute_command(self, *args, **options):
        table = read_table(options['table'])
        subspace = restrict_subspace(table, options['size'], options['threshold'])
        text = json.dumps(RestrictedSubspaceSerializer(subspace).data, indent=1)
        if options['out']:
            Path(options['out']).write_text(text)
            self.stdout.write(self.style.SUCCESS(f'Restricted to {len(subspace)} configs'))
        else:
            self.stdout.write(text)
