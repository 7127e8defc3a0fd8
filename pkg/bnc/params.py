from dataclasses import dataclass, field, fields

from django.conf import settings

from core.exceptions import ConfigurationError

METRIC_MODES = ('effort', 'wall')


def _default(key, sub=None):
    def factory():
        value = settings.L2SEP[key]
        return value[sub] if sub else value
    return field(default_factory=factory)


@dataclass
class BnCParams:
    """Branch-and-cut limits and effort weights; defaults come from settings.L2SEP."""
    max_sep_rounds_root: int = _default('SEP_ROUNDS_ROOT')
    node_sep_freq: int = _default('NODE_SEP_FREQ')
    max_cuts_per_round: int = _default('MAX_CUTS_PER_ROUND')
    parallelism_thresh: float = _default('PARALLELISM_THRESHOLD')
    gap_limit: float = 0.0
    node_limit: int = _default('NODE_LIMIT')
    # absolute budget in the active metric; None means unlimited
    effort_limit: float = None
    w_pivot: float = _default('EFFORT_WEIGHTS', 'pivot')
    w_sepcall: float = _default('EFFORT_WEIGHTS', 'sepcall')
    w_node: float = _default('EFFORT_WEIGHTS', 'node')
    hard_stop_ratio: float = _default('HARD_STOP_RATIO')
    metric: str = 'effort'

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ('max_sep_rounds_root', 'node_sep_freq', 'max_cuts_per_round',
                     'gap_limit', 'node_limit', 'hard_stop_ratio'):
            if getattr(self, name) < 0:
                raise ConfigurationError(f'{name} must be >= 0.')
        for name in ('w_pivot', 'w_sepcall', 'w_node'):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f'{name} must be > 0.')
        if not 0 <= self.parallelism_thresh <= 1:
            raise ConfigurationError('parallelism_thresh must lie in [0, 1].')
        if self.metric not in METRIC_MODES:
            raise ConfigurationError(f'metric must be one of {METRIC_MODES}.')
        if self.effort_limit is not None and self.effort_limit <= 0:
            raise ConfigurationError('effort_limit must be > 0 when given.')

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}
