import json
import logging
from pathlib import Path

from bandit.config import TrainRunConfigSerializer
from bandit.environment import SolverEnvironment
from bandit.training import forward_training
from bnc.serializers import BnCParamsSerializer
from core.commands import L2SepCommand
from core.exceptions import ConfigurationError
from instances.io import read_instances
from model.checkpoint import save_net
from subspace.serializers import RestrictedSubspaceSerializer

logger = logging.getLogger(__name__)


class Command(L2SepCommand):
    help = 'Forward training of one reward network per configuration update with neural UCB.'

    def add_arguments(self, parser):
        parser.add_argument('--instances', required=True, help='Directory of K_large instance files.')
        parser.add_argument('--subspace', required=True, help='Restricted subspace JSON.')
        parser.add_argument('--run-config', help='Training run JSON; defaults apply to missing keys.')
        parser.add_argument('--class', dest='class_tag',
                            help='Instance class picking the update rounds when the run config has none; defaults to the class of the first instance.')
        parser.add_argument('--params', help='Solver parameter JSON.')
        parser.add_argument('--jobs', type=int)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help='Directory for nets, UCB states, buffers and metrics.')

    def execute_command(self, *args, **options):
        instances = read_instances(options['instances'])
        if not instances:
            raise ConfigurationError(f'No instances found in {options["instances"]}.')
        subspace = self.validated(RestrictedSubspaceSerializer, self.load_json(options['subspace'], 'subspace'),
                                  'subspace')
        params = self.validated(BnCParamsSerializer, self.load_json(options['params'], 'params') or {},
                                'params')
        data = self.load_json(options['run_config'], 'run config') or {}
        class_tag = options['class_tag'] or instances[0].class_tag
        run_cfg = self.validated(TrainRunConfigSerializer, data, 'run config', context={'class_tag': class_tag})
        run_cfg.validate(len(subspace))

        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)
        (out / 'run_config.json').write_text(json.dumps(TrainRunConfigSerializer(run_cfg).data, indent=1))
        env = SolverEnvironment(params, run_cfg.update_rounds, subspace.configs, run_cfg.sep_feat,
                                run_cfg.repetitions, n_jobs=options['jobs'])
        logger.info('Training %d nets on %d instances, |A|=%d, seed %d',
                    run_cfg.steps, len(instances), len(subspace), options['seed'])
        steps = forward_training(instances, subspace.configs, run_cfg, env, options['seed'],
                                 metrics_path=out / 'metrics.jsonl', buffer_dir=out)
        for j, step in enumerate(steps):
            save_net(step.net, out / f'net_{j}.json')
            step.state.save(out / f'ucb_{j}.npz')
        self.stdout.write(self.style.SUCCESS(f'Trained {len(steps)} nets into {out}'))
