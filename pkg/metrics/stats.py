import numpy as np

from core.exceptions import MetricDomainError


def interquartile_mean(values):
    """Mean of the samples inside [Q1, Q3], bounds inclusive, quartiles linearly interpolated."""
    values = np.asarray(values, dtype=float)
    q1, q3 = np.quantile(values, [0.25, 0.75], method='linear')
    inside = values[(values >= q1) & (values <= q3)]
    return float(inside.mean())


def aggregate(samples):
    """median / iqm / mean / (population) std of a list of improvements."""
    values = np.asarray(
        [getattr(sample, 'delta', sample) for sample in samples], dtype=float,
    )
    if not len(values):
        raise MetricDomainError('aggregate needs at least one sample.')
    return {
        'median': float(np.median(values)),
        'iqm': interquartile_mean(values),
        'mean': float(values.mean()),
        'std': float(values.std()),
    }
