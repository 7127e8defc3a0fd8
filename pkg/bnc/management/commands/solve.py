import json
import logging
from pathlib import Path

from bnc.schedule import default_schedule
from bnc.serializers import BnCParamsSerializer, ConfigScheduleSerializer, SolveResultSerializer
from bnc.solver import solve
from core.commands import L2SepCommand
from instances.io import read_instance

logger = logging.getLogger(__name__)


class Command(L2SepCommand):
    help = 'Solve one instance with branch-and-cut under a separator schedule.'

    def add_arguments(self, parser):
        parser.add_argument('--instance', required=True)
        parser.add_argument('--schedule', help='Schedule JSON; default is every separator on.')
        parser.add_argument('--params', help='Solver parameter JSON.')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--reference-effort', type=float,
                            help='Enables the hard stop at the configured ratio of this value.')
        parser.add_argument('--out', help='Write the result here instead of stdout.')

    def execute_command(self, *args, **options):
        instance = read_instance(options['instance'])
        schedule_data = self.load_json(options['schedule'], 'schedule')
        schedule = (self.validated(ConfigScheduleSerializer, schedule_data, 'schedule')
                    if schedule_data is not None else default_schedule())
        params = self.validated(BnCParamsSerializer, self.load_json(options['params'], 'params') or {},
                                'params')
        logger.info('Solving %s with schedule %s', instance.name, schedule)
        result = solve(instance, schedule, params, seed=options['seed'],
                       reference_effort=options['reference_effort'])
        text = json.dumps(SolveResultSerializer(result).data, indent=1)
        if options['out']:
            Path(options['out']).write_text(text)
        else:
            self.stdout.write(text)
