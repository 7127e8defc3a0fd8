import logging
from pathlib import Path

from core.commands import L2SepCommand
from instances.generators import GENERATORS, generate, instance_seeds
from instances.io import write_instance

logger = logging.getLogger(__name__)


class Command(L2SepCommand):
    help = 'Generate a dataset of synthetic MILP instances as JSON files.'

    def add_arguments(self, parser):
        parser.add_argument('--class', dest='class_tag', required=True,
                            choices=sorted(str(tag) for tag in GENERATORS))
        parser.add_argument('--count', type=int, required=True)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--split-id', type=int, default=0,
                            help='Dataset split; different splits never share seeds.')
        parser.add_argument('--out', required=True)
        parser.add_argument('--full-size', action='store_true')

    def execute_command(self, *args, **options):
        out = Path(options['out'])
        seeds = instance_seeds(options['seed'], options['split_id'], options['count'])
        logger.info('Generating %d %s instances (base seed %d, split %d) into %s',
                    len(seeds), options['class_tag'], options['seed'], options['split_id'], out)
        for i, seed in enumerate(seeds):
            instance = generate(options['class_tag'], seed, full_size=options['full_size'])
            write_instance(instance, out / f'{i:05d}_{instance.name}.json')
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(seeds)} instances to {out}'))
