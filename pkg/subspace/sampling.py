import logging
from itertools import combinations

import numpy as np

from separators.config import SeparatorConfig

logger = logging.getLogger(__name__)


def near_zero(width, radius):
    """Every configuration with at most `radius` active separators."""
    return [
        SeparatorConfig(sum(1 << k for k in chosen), width)
        for size in range(radius + 1)
        for chosen in combinations(range(width), size)
    ]


def hamming_ball(center, radius):
    return [
        SeparatorConfig(center.bits ^ sum(1 << k for k in flipped), center.width)
        for size in range(radius + 1)
        for flipped in combinations(range(center.width), size)
    ]


def sample_initial_configs(width, n_random, hamming_radius, seed, evaluate):
    """
    Initial candidate set: the near-zero configurations, plus the best of
    `n_random` uniform draws (scored by `evaluate`, a callable mapping a list
    of configs to their mean improvement), its Hamming ball and all subsets
    of its active set. Sorted by bitmask, without duplicates.
    """
    candidates = set(near_zero(width, hamming_radius))
    if n_random > 0:
        rng = np.random.default_rng(seed)
        drawn = []
        for bits in rng.integers(0, 1 << width, size=n_random).tolist():
            config = SeparatorConfig(int(bits), width)
            if config not in drawn:
                drawn.append(config)
        scores = np.asarray(evaluate(drawn), dtype=float)
        pivot = drawn[int(np.argmax(scores))]
        logger.info('Best random configuration %s (mean improvement %.4f)', pivot, scores.max())
        candidates.update(hamming_ball(pivot, hamming_radius))
        candidates.update(pivot.subsets())
    return sorted(candidates)
