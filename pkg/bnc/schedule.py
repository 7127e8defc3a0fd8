from dataclasses import dataclass

from core.exceptions import ConfigurationError
from separators.config import SeparatorConfig


@dataclass(frozen=True)
class ConfigSchedule:
    """
    Piecewise-constant separator configuration over the global separation
    round counter: config s_j is active on rounds [n_j, n_{j+1}) and the last
    one persists until the solve ends.

    `updates` is a tuple of (round_index, SeparatorConfig). When the first
    update is not at round 0, `prefix` covers the rounds before it.
    """
    updates: tuple
    prefix: SeparatorConfig = None

    def __post_init__(self):
        updates = tuple((int(n), config) for n, config in self.updates)
        object.__setattr__(self, 'updates', updates)
        if not updates:
            raise ConfigurationError('A schedule needs at least one update.')
        rounds = [n for n, _ in updates]
        if rounds[0] < 0 or any(b <= a for a, b in zip(rounds, rounds[1:])):
            raise ConfigurationError(f'Update rounds must be strictly increasing from 0, got {rounds}.')
        if rounds[0] != 0 and self.prefix is None:
            raise ConfigurationError('A schedule starting after round 0 needs a prefix config.')

    @classmethod
    def constant(cls, config):
        return cls(((0, config),))

    @classmethod
    def from_configs(cls, rounds, configs):
        return cls(tuple(zip(rounds, configs)))

    @property
    def update_rounds(self):
        return tuple(n for n, _ in self.updates)

    @property
    def configs(self):
        return tuple(config for _, config in self.updates)

    def __len__(self):
        return len(self.updates)

    def config_at(self, round_index):
        active = self.prefix
        for n, config in self.updates:
            if n > round_index:
                break
            active = config
        return active

    def update_index_at(self, round_index):
        """Index j of the update that starts exactly at `round_index`, or None."""
        for j, (n, _) in enumerate(self.updates):
            if n == round_index:
                return j
        return None

    def next_update_after(self, round_index):
        for n, _ in self.updates:
            if n > round_index:
                return n
        return None

    def replace(self, j, config):
        updates = list(self.updates)
        updates[j] = (updates[j][0], config)
        return ConfigSchedule(tuple(updates), self.prefix)

    def truncated(self, count):
        """The first `count` updates; the last kept config persists to the end."""
        return ConfigSchedule(self.updates[:count], self.prefix)

    def extended(self, round_index, config):
        return ConfigSchedule(self.updates + ((round_index, config),), self.prefix)

    def __str__(self):
        return ' '.join(f'{n}:{config}' for n, config in self.updates)


def default_schedule():
    """Every separator active from round 0 on; the reference t_0 of all rewards."""
    return ConfigSchedule.constant(SeparatorConfig.all_on())
