from dataclasses import asdict, dataclass, field

from django.conf import settings
from rest_framework import serializers

from core.exceptions import ConfigurationError
from instances.generators import TANG_CLASSES
from .ucb import Z_MODES

STRATEGIES = ('ucb', 'egreedy')
REFIT_MODES = ('warm', 'restart')
INFERENCE_STRATEGIES = ('point', 'ucb')


def update_rounds_for(class_tag, steps=2):
    """Update rounds n_1..n_k: 0, then 5 (Tang classes) or 8, then 12 or 20."""
    tang = class_tag in TANG_CLASSES
    rounds = (0, 5, 12) if tang else (0, 8, 20)
    if not 1 <= steps <= len(rounds):
        raise ConfigurationError(f'Forward training supports 1 to {len(rounds)} update steps.')
    return rounds[:steps]


@dataclass
class TrainRunConfig:
    epochs: int = 70
    instances_per_epoch: int = 6
    configs_per_instance: int = 8
    steps: int = 2
    update_rounds: tuple = (0, 5)
    strategy: str = 'ucb'
    epsilon: float = 0.1
    ucb_z: str = None
    gamma: float = field(default_factory=lambda: settings.L2SEP['UCB_GAMMA'])
    lam: float = field(default_factory=lambda: settings.L2SEP['UCB_LAMBDA'])
    refit: str = 'warm'
    fit_epochs: int = 5
    lr: float = 1e-3
    batch: int = 64
    sep_feat: str = 'rich'
    hidden: int = 64
    repetitions: int = 1

    def __post_init__(self):
        self.update_rounds = tuple(int(n) for n in self.update_rounds)

    def validate(self, subspace_size=None):
        if len(self.update_rounds) != self.steps:
            raise ConfigurationError(
                f'{self.steps} update steps need {self.steps} update rounds, got {self.update_rounds}.'
            )
        if any(b <= a for a, b in zip(self.update_rounds, self.update_rounds[1:])):
            raise ConfigurationError(f'Update rounds must increase, got {self.update_rounds}.')
        if subspace_size is not None and self.configs_per_instance > subspace_size:
            raise ConfigurationError(
                f'D={self.configs_per_instance} exceeds the subspace size {subspace_size}.'
            )
        return self

    def as_dict(self):
        data = asdict(self)
        data['update_rounds'] = list(self.update_rounds)
        return data


class TrainRunConfigSerializer(serializers.Serializer):
    epochs = serializers.IntegerField(min_value=1, required=False)
    instances_per_epoch = serializers.IntegerField(min_value=1, required=False)
    configs_per_instance = serializers.IntegerField(min_value=1, required=False)
    steps = serializers.IntegerField(min_value=1, max_value=3, required=False)
    update_rounds = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    strategy = serializers.ChoiceField(choices=STRATEGIES, required=False)
    epsilon = serializers.FloatField(min_value=0, max_value=1, required=False)
    ucb_z = serializers.ChoiceField(choices=Z_MODES, required=False, allow_null=True)
    gamma = serializers.FloatField(min_value=0, required=False)
    lam = serializers.FloatField(required=False)
    refit = serializers.ChoiceField(choices=REFIT_MODES, required=False)
    fit_epochs = serializers.IntegerField(min_value=1, required=False)
    lr = serializers.FloatField(required=False)
    batch = serializers.IntegerField(min_value=1, required=False)
    sep_feat = serializers.ChoiceField(choices=('rich', 'binary'), required=False)
    hidden = serializers.IntegerField(min_value=4, required=False)
    repetitions = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        if 'lam' in data and data['lam'] <= 0:
            raise serializers.ValidationError({'lam': ['Must be > 0.']})
        if 'lr' in data and data['lr'] <= 0:
            raise serializers.ValidationError({'lr': ['Must be > 0.']})
        if 'hidden' in data and data['hidden'] % 4:
            raise serializers.ValidationError({'hidden': ['Must be a multiple of the 4 heads.']})
        if 'update_rounds' not in data:
            class_tag = self.context.get('class_tag')
            if class_tag is not None:
                data['update_rounds'] = update_rounds_for(class_tag, data.get('steps', 2))
            elif self.parent is None:
                raise serializers.ValidationError(
                    {'update_rounds': ['Required unless the instance class is known.']}
                )
        return data

    def create(self, validated_data):
        return TrainRunConfig(**validated_data).validate()

    def to_representation(self, config):
        return config.as_dict()
