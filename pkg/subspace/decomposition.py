"""
Expected performance of a predictor restricted to a subspace A under the
mistake models used to pick the filter threshold b and the size |A|.

A generalization mistake (probability alpha) replaces the best member of A
with a uniformly random one on an unseen instance; a training mistake
(probability beta) does the same on the training table.
"""

import numpy as np

from core.exceptions import ConfigurationError
from .restriction import erm_performance, instance_agnostic_perf


def _probability(name, value):
    if not 0 <= value <= 1:
        raise ConfigurationError(f'{name} must be in [0, 1], got {value}.')
    return float(value)


def mean_agnostic(configs, table):
    """Mean instance-agnostic performance over the members of A."""
    return float(np.mean([instance_agnostic_perf(config, table) for config in configs]))


def generalization_decomposition(configs, table, alpha, population=None):
    """(1 - alpha) * ERM performance + alpha * mean member performance on `population`."""
    alpha = _probability('alpha', alpha)
    population = table if population is None else population
    return (1 - alpha) * erm_performance(configs, table) + alpha * mean_agnostic(configs, population)


def training_error_decomposition(configs, table, alpha, beta, population=None):
    """Three-term expectation with both the training error beta and the generalization error alpha."""
    alpha = _probability('alpha', alpha)
    beta = _probability('beta', beta)
    population = table if population is None else population
    return ((1 - alpha) * (1 - beta) * erm_performance(configs, table)
            + (1 - alpha) * beta * mean_agnostic(configs, table)
            + alpha * mean_agnostic(configs, population))


def combined_weight(alpha, beta):
    """Probability that at least one of the two mistakes happens."""
    alpha = _probability('alpha', alpha)
    beta = _probability('beta', beta)
    return alpha + beta - alpha * beta
