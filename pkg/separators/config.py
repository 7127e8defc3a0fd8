from dataclasses import dataclass
from itertools import combinations

import numpy as np

from core.exceptions import ConfigurationError

SEPARATOR_NAMES = (
    'gomory_fractional',
    'gomory_mir',
    'cmir_aggregation',
    'knapsack_cover',
    'clique',
    'oddcycle',
    'zerohalf',
    'impliedbounds',
)
NUM_SEPARATORS = len(SEPARATOR_NAMES)


@dataclass(frozen=True, order=True)
class SeparatorConfig:
    """
    Activation bitmask over the separators; bit k (least significant first)
    switches on SEPARATOR_NAMES[k].
    """
    bits: int
    width: int = NUM_SEPARATORS

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.width):
            raise ConfigurationError(f'bits={self.bits} does not fit in {self.width} separators.')

    @classmethod
    def all_on(cls, width=NUM_SEPARATORS):
        return cls((1 << width) - 1, width)

    @classmethod
    def all_off(cls, width=NUM_SEPARATORS):
        return cls(0, width)

    @classmethod
    def from_names(cls, names, width=NUM_SEPARATORS):
        bits = 0
        for name in names:
            bits |= 1 << SEPARATOR_NAMES.index(name)
        return cls(bits, width)

    @classmethod
    def from_vector(cls, vector):
        vector = [int(v) for v in vector]
        return cls(sum(v << k for k, v in enumerate(vector)), len(vector))

    def is_active(self, k):
        return bool(self.bits >> k & 1)

    @property
    def active(self):
        return tuple(k for k in range(self.width) if self.is_active(k))

    @property
    def names(self):
        return tuple(SEPARATOR_NAMES[k] for k in self.active)

    @property
    def count(self):
        return bin(self.bits).count('1')

    def vector(self):
        return np.array([self.bits >> k & 1 for k in range(self.width)], dtype=float)

    def flip(self, k):
        return SeparatorConfig(self.bits ^ (1 << k), self.width)

    def hamming(self, other):
        return bin(self.bits ^ other.bits).count('1')

    def subsets(self):
        """Every configuration whose active set is contained in this one's."""
        active = self.active
        return [
            SeparatorConfig(sum(1 << k for k in chosen), self.width)
            for size in range(len(active) + 1)
            for chosen in combinations(active, size)
        ]

    def __str__(self):
        return format(self.bits, f'0{self.width}b')


def all_configs(width=NUM_SEPARATORS):
    return [SeparatorConfig(bits, width) for bits in range(1 << width)]
