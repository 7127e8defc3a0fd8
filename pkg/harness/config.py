from dataclasses import asdict, dataclass, field

from bandit.config import INFERENCE_STRATEGIES, TrainRunConfig, update_rounds_for
from bnc.params import BnCParams
from core.exceptions import ConfigurationError
from instances.generators import instance_seeds

METHODS = ('default', 'random', 'prune', 'instance_agnostic', 'random_within_subspace', 'l2sep')
OBJECTIVES = ('time', 'gap')
SPLITS = {'small': 0, 'large': 1, 'valid': 2, 'test': 3}

# evaluation floor of the relative improvement under the hard stop
EVAL_FLOOR = -3.0


@dataclass
class ExperimentConfig:
    name: str
    class_tag: str
    seed: int = 0
    k_small: int = 40
    k_large: int = 200
    valid: int = 20
    test: int = 50
    full_size: bool = False
    params: BnCParams = field(default_factory=BnCParams)
    n_random: int = 500
    hamming_radius: int = 3
    subspace_size: int = 12
    # None means no instance-agnostic filter
    threshold: float = 0.0
    resubspace_at_update2: bool = False
    run_cfg: TrainRunConfig = None
    objective: str = 'time'
    gap_limit_fraction: float = 0.5
    inference_strategy: str = 'point'
    methods: tuple = METHODS

    def __post_init__(self):
        if self.run_cfg is None:
            self.run_cfg = TrainRunConfig(update_rounds=update_rounds_for(self.class_tag))
        self.methods = tuple(self.methods)

    @property
    def metric(self):
        return self.params.metric

    def split_seeds(self, split):
        """Instance seeds of a split; splits never share a seed."""
        return instance_seeds(self.seed, SPLITS[split], self.split_size(split))

    def split_size(self, split):
        return {'small': self.k_small, 'large': self.k_large, 'valid': self.valid, 'test': self.test}[split]

    def validate(self):
        if self.objective not in OBJECTIVES:
            raise ConfigurationError(f'objective must be one of {OBJECTIVES}.')
        if self.inference_strategy not in INFERENCE_STRATEGIES + ('validate',):
            raise ConfigurationError(f'Unknown inference strategy {self.inference_strategy!r}.')
        if self.inference_strategy == 'validate' and self.valid < 1:
            raise ConfigurationError('Choosing the inference strategy needs a validation split.')
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigurationError(f'Unknown methods {sorted(unknown)}.')
        if self.resubspace_at_update2 and self.run_cfg.steps < 2:
            raise ConfigurationError('A second subspace needs at least two update steps.')
        self.run_cfg.validate(self.subspace_size)
        return self

    def as_dict(self):
        data = asdict(self)
        data['params'] = self.params.as_dict()
        data['run_cfg'] = self.run_cfg.as_dict()
        data['methods'] = list(self.methods)
        return data
