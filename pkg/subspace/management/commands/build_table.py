import logging

from rest_framework import serializers

from bnc.runs import reference_results
from bnc.serializers import BnCParamsSerializer, ConfigScheduleSerializer, SeparatorConfigField
from core.commands import L2SepCommand
from core.exceptions import ConfigurationError
from instances.io import read_instances
from separators.config import NUM_SEPARATORS
from subspace.sampling import sample_initial_configs
from subspace.table import build_reward_table, write_table

logger = logging.getLogger(__name__)


class Command(L2SepCommand):
    help = 'Solve every (configuration, instance) pair and write the clipped reward table.'

    def add_arguments(self, parser):
        parser.add_argument('--instances', required=True, help='Directory of instance JSON files.')
        parser.add_argument('--configs', help='JSON list of configs; default samples the initial set.')
        parser.add_argument('--n-random', type=int, default=500)
        parser.add_argument('--hamming-radius', type=int, default=3)
        parser.add_argument('--params', help='Solver parameter JSON.')
        parser.add_argument('--prefix', help='Schedule JSON fixing the earlier update rounds.')
        parser.add_argument('--update-round', type=int, default=0)
        parser.add_argument('--repetitions', type=int, default=1)
        parser.add_argument('--r-min', type=float)
        parser.add_argument('--jobs', type=int)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help='Table path; .csv and .json are written.')

    def execute_command(self, *args, **options):
        instances = read_instances(options['instances'])
        if not instances:
            raise ConfigurationError(f'No instances found in {options["instances"]}.')
        params = self.validated(BnCParamsSerializer, self.load_json(options['params'], 'params') or {},
                                'params')
        prefix_data = self.load_json(options['prefix'], 'prefix schedule')
        prefix = (self.validated(ConfigScheduleSerializer, prefix_data, 'prefix schedule')
                  if prefix_data is not None else None)
        jobs = options['jobs']
        references = [result.measure(params.metric)
                      for result in reference_results(instances, params, jobs)]

        def evaluate(configs):
            table = build_reward_table(configs, instances, params, references=references,
                                       r_min=options['r_min'], n_jobs=jobs)
            return table.values.mean(axis=1)

        configs_data = self.load_json(options['configs'], 'configs')
        if configs_data is None:
            configs = sample_initial_configs(NUM_SEPARATORS, options['n_random'],
                                             options['hamming_radius'], options['seed'], evaluate)
        else:
            field = SeparatorConfigField()
            try:
                configs = sorted({field.run_validation(item) for item in configs_data})
            except serializers.ValidationError as exc:
                raise ConfigurationError(f'Invalid configs list: {exc.detail}') from exc
        logger.info('Reward table over %d configs and %d instances (seed %d)',
                    len(configs), len(instances), options['seed'])
        table = build_reward_table(configs, instances, params, schedule_prefix=prefix,
                                   update_round=options['update_round'],
                                   repetitions=options['repetitions'], r_min=options['r_min'],
                                   n_jobs=jobs, references=references)
        write_table(table, options['out'])
        self.stdout.write(self.style.SUCCESS(f'Wrote a {table.shape[0]}x{table.shape[1]} table'))
