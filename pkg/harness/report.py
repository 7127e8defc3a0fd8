"""Plot-ready CSV reports of an evaluation."""

import logging
from dataclasses import asdict
from pathlib import Path

import pandas as pd

from metrics.stats import aggregate
from separators.config import SEPARATOR_NAMES
from subspace.restriction import tradeoff_curve

logger = logging.getLogger(__name__)

STAT_COLUMNS = ('median', 'iqm', 'mean', 'std')


def quantity(objective):
    return 'gap_improvement' if objective == 'gap' else 'delta'


def samples_frame(results):
    rows = []
    for samples in results.values():
        for sample in samples:
            row = asdict(sample)
            row['configs'] = ' '.join(str(config.bits) for config in sample.configs)
            rows.append(row)
    return pd.DataFrame(rows, columns=['method', 'instance', 'delta', 'status', 'measure', 'gap', 'configs'])


def results_frame(results, objective='time'):
    """median / iqm / mean / std of each method's improvements."""
    rows = []
    for method, samples in results.items():
        row = {'method': method, 'quantity': quantity(objective), 'count': len(samples)}
        row.update(aggregate([sample.delta for sample in samples]))
        rows.append(row)
    return pd.DataFrame(rows, columns=['method', 'quantity', *STAT_COLUMNS, 'count']).set_index('method')


def default_stats_frame(results):
    """Absolute statistics of the default solves."""
    frame = samples_frame({'default': results.get('default', [])})
    return frame[['measure', 'gap']].astype(float).describe().T


def heatmap_frame(configs):
    """Separator x config activation matrix of a subspace."""
    configs = sorted(configs)
    return pd.DataFrame(
        [[int(config.is_active(k)) for config in configs] for k in range(len(SEPARATOR_NAMES))],
        index=list(SEPARATOR_NAMES),
        columns=[config.bits for config in configs],
    )


def frequency_frame(samples):
    """Per-update selection frequency of each config; every update's frequencies sum to 1."""
    rows = [
        {'update_index': j, 'config': config.bits}
        for sample in samples
        for j, config in enumerate(sample.configs)
    ]
    if not rows:
        return pd.DataFrame(columns=['update_index', 'config', 'count', 'frequency'])
    frame = pd.DataFrame(rows).value_counts().rename('count').reset_index()
    frame = frame.sort_values(['update_index', 'config'], ignore_index=True)
    frame['frequency'] = frame['count'] / frame.groupby('update_index')['count'].transform('sum')
    return frame


def write_report(results, out_dir, objective='time', subspace=None, table=None, thresholds=None,
                 size=None):
    """Write every report file into `out_dir`; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}

    summary = results_frame(results, objective)
    written['results'] = out / 'results.csv'
    summary.to_csv(written['results'])
    written['results_text'] = out / 'results.txt'
    written['results_text'].write_text(summary.to_string(float_format=lambda v: f'{v:.4f}') + '\n')
    written['samples'] = out / 'samples.csv'
    samples_frame(results).to_csv(written['samples'], index=False)
    if 'default' in results:
        written['default_stats'] = out / 'default_stats.csv'
        default_stats_frame(results).to_csv(written['default_stats'])
    if 'l2sep' in results:
        written['frequencies'] = out / 'frequencies.csv'
        frequency_frame(results['l2sep']).to_csv(written['frequencies'], index=False)
    if subspace is not None:
        written['heatmap'] = out / 'heatmap.csv'
        heatmap_frame(subspace).to_csv(written['heatmap'])
    if table is not None and thresholds:
        written['tradeoff'] = out / 'tradeoff.csv'
        tradeoff_curve(table, thresholds, size or 12).to_csv(written['tradeoff'], index=False)
    logger.info('Report written to %s (%s)', out, ', '.join(sorted(written)))
    return written
