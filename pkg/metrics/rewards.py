import math
from dataclasses import dataclass

from django.conf import settings

from core.exceptions import MetricDomainError


def rel_improvement(t0, t_pi):
    """Relative improvement (t0 - t_pi) / t0 of a policy over the default."""
    if not t0 > 0:
        raise MetricDomainError(f'Reference time must be positive, got {t0}.')
    return (t0 - t_pi) / t0


def clipped_reward(deltas, r_min=None):
    """Mean of max(delta_i, r_min) over l solver repetitions."""
    r_min = settings.L2SEP['R_MIN'] if r_min is None else r_min
    deltas = list(deltas)
    if not deltas:
        raise MetricDomainError('clipped_reward needs at least one delta.')
    return sum(max(delta, r_min) for delta in deltas) / len(deltas)


def gap_improvement(g0, g_pi, eps=1e-9):
    return (g0 - g_pi) / (max(g0, g_pi) + eps)


@dataclass(frozen=True)
class ImprovementSample:
    instance_id: str
    t0: float
    t_pi: float

    @property
    def delta(self):
        return rel_improvement(self.t0, self.t_pi)

    @property
    def is_finite(self):
        return math.isfinite(self.t_pi)
