"""
Configuration-space restriction: greedy maximization of the ERM training
performance over configurations that pass the instance-agnostic filter.

The ERM objective (the mean over instances of the best reward within A) is
a facility-location function, monotone and submodular, so marginal gains
can be evaluated lazily from a max-heap of stale upper bounds.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.exceptions import ConfigurationError, EmptySubspaceError

logger = logging.getLogger(__name__)


@dataclass
class RestrictedSubspace:
    configs: list
    threshold: float
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)

    def __contains__(self, config):
        return config in self.configs


def _floor(table):
    return min(table.r_min, float(table.values.min()))


def instance_agnostic_perf(config, table):
    """Mean reward of one configuration over the table's instances."""
    return float(np.mean(table.row(config)))


def erm_performance(configs, table):
    """Mean over instances of the best reward any configuration in `configs` gets."""
    configs = list(configs)
    if not configs:
        return _floor(table)
    rows = [table.index_of(config) for config in configs]
    return float(table.values[rows].max(axis=0).mean())


def marginal_gain(configs, config, table):
    return erm_performance(list(configs) + [config], table) - erm_performance(configs, table)


def restrict_subspace(table, size, threshold=-math.inf):
    """
    Greedy subspace of at most `size` configurations, each with mean reward
    above `threshold`. Ties in marginal gain go to the higher mean reward,
    then to the lower bitmask.
    """
    if size < 1:
        raise ConfigurationError('Subspace size must be >= 1.')
    means = table.values.mean(axis=1)
    passing = [i for i in range(len(table.configs)) if means[i] > threshold]
    if not passing:
        raise EmptySubspaceError(threshold)
    logger.info('%d of %d configurations pass the filter b=%s', len(passing), len(table.configs), threshold)

    best = np.full(table.values.shape[1], _floor(table))
    current = float(best.mean())
    heap = [(-(means[i] - current), -means[i], table.configs[i].bits, i) for i in passing]
    heapq.heapify(heap)

    subspace = RestrictedSubspace([], threshold)
    while heap and len(subspace) < size:
        _, neg_mean, bits, i = heapq.heappop(heap)
        gain = float(np.maximum(best, table.values[i]).mean()) - current
        key = (-gain, neg_mean, bits, i)
        if heap and key > heap[0]:
            heapq.heappush(heap, key)
            continue
        best = np.maximum(best, table.values[i])
        current = float(best.mean())
        subspace.configs.append(table.configs[i])
        member_means = [float(means[table.index_of(c)]) for c in subspace.configs]
        subspace.steps.append({
            'step': len(subspace),
            'config': table.configs[i].bits,
            'gain': gain,
            'erm_performance': current,
            'mean_agnostic': float(np.mean(member_means)),
            'worst_agnostic': float(min(member_means)),
        })
        logger.debug('Step %d: %s gain=%.4f erm=%.4f', len(subspace), table.configs[i], gain, current)
    return subspace


def tradeoff_curve(table, thresholds, size):
    """
    Per-threshold greedy trajectories of the training term (ERM performance)
    and the generalization term (mean instance-agnostic performance of A).
    """
    frames = []
    for threshold in thresholds:
        try:
            subspace = restrict_subspace(table, size, threshold)
        except EmptySubspaceError:
            logger.warning('No configuration passes b=%s; skipped in the trade-off curve', threshold)
            continue
        frame = pd.DataFrame(subspace.steps)
        frame.insert(0, 'threshold', threshold)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=['threshold', 'step', 'config', 'gain', 'erm_performance',
                                     'mean_agnostic', 'worst_agnostic'])
    return pd.concat(frames, ignore_index=True)
