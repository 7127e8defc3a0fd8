"""
Reward table T[i, j]: clipped improvement of configuration i on instance j
over the default schedule, collected at one update round.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings

from bnc.runs import SolveTask, reference_results, reward_of, run_solves
from bnc.schedule import ConfigSchedule
from core.exceptions import ConfigurationError
from separators.config import NUM_SEPARATORS, SeparatorConfig

logger = logging.getLogger(__name__)

TABLE_VERSION = 1


@dataclass
class RewardTable:
    configs: list
    instances: list
    values: np.ndarray
    update_round: int = 0
    r_min: float = field(default_factory=lambda: settings.L2SEP['R_MIN'])
    flagged: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.configs), len(self.instances)):
            raise ConfigurationError(
                f'Table shape {self.values.shape} does not match '
                f'{len(self.configs)} configs x {len(self.instances)} instances.'
            )
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError('Reward table has missing entries.')
        if np.any(self.values < self.r_min - 1e-12):
            raise ConfigurationError(f'Reward table has entries below r_min={self.r_min}.')
        if self.flagged is None:
            self.flagged = np.zeros(self.values.shape, dtype=bool)
        if len(set(self.configs)) != len(self.configs):
            raise ConfigurationError('Reward table configs must be distinct.')

    @property
    def shape(self):
        return self.values.shape

    def index_of(self, config):
        return self.configs.index(config)

    def row(self, config):
        return self.values[self.index_of(config)]

    def to_frame(self):
        return pd.DataFrame(self.values, index=[c.bits for c in self.configs],
                            columns=list(self.instances))

    def subset(self, configs):
        rows = [self.index_of(config) for config in configs]
        return RewardTable(list(configs), list(self.instances), self.values[rows],
                           self.update_round, self.r_min, self.flagged[rows])


def write_table(table, path):
    """`<path>.csv` holds the matrix, `<path>.json` the header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = table.to_frame()
    frame.index.name = 'config'
    frame.to_csv(path.with_suffix('.csv'), float_format='%.17g')
    header = {
        'version': TABLE_VERSION,
        'width': table.configs[0].width if table.configs else NUM_SEPARATORS,
        'update_round': table.update_round,
        'r_min': table.r_min,
        'configs': [config.bits for config in table.configs],
        'instances': list(table.instances),
        'flagged': np.argwhere(table.flagged).tolist(),
    }
    path.with_suffix('.json').write_text(json.dumps(header, indent=1))
    logger.info('Wrote %dx%d reward table to %s', *table.shape, path.with_suffix('.csv'))


def read_table(path):
    path = Path(path)
    try:
        header = json.loads(path.with_suffix('.json').read_text())
        frame = pd.read_csv(path.with_suffix('.csv'), index_col=0)
    except FileNotFoundError as exc:
        raise ConfigurationError(f'Reward table {path} not found: {exc.filename}') from exc
    if header.get('version') != TABLE_VERSION:
        raise ConfigurationError(f'Unsupported reward table version {header.get("version")}.')
    width = header['width']
    if [int(b) for b in frame.index] != header['configs']:
        raise ConfigurationError('Reward table CSV rows do not match its header.')
    frame = frame[header['instances']]
    flagged = np.zeros(frame.shape, dtype=bool)
    for i, j in header['flagged']:
        flagged[i, j] = True
    return RewardTable(
        configs=[SeparatorConfig(bits, width) for bits in header['configs']],
        instances=list(header['instances']),
        values=frame.to_numpy(dtype=float),
        update_round=header['update_round'],
        r_min=header['r_min'],
        flagged=flagged,
    )


def cell_schedule(config, update_round=0, schedule_prefix=None):
    """Schedule that holds `config` from `update_round` to termination after the prefix."""
    if schedule_prefix is None:
        if update_round != 0:
            raise ConfigurationError('A later update round needs the schedule prefix before it.')
        return ConfigSchedule.constant(config)
    return schedule_prefix.extended(update_round, config)


def build_reward_table(configs, instances, params, schedule_prefix=None, update_round=0,
                       repetitions=1, r_min=None, n_jobs=None, references=None, prefix_policy=None):
    """
    Solve every (config, instance) cell and record its clipped reward.

    `references` are the t_0 values per instance (computed from the default
    schedule when omitted). A failed cell is set to r_min and flagged.
    `prefix_policy` drives the updates of the prefix, e.g. trained earlier nets.
    """
    r_min = settings.L2SEP['R_MIN'] if r_min is None else r_min
    configs = list(configs)
    instances = list(instances)
    if references is None:
        references = [result.measure(params.metric)
                      for result in reference_results(instances, params, n_jobs)]

    tasks = []
    for config in configs:
        schedule = cell_schedule(config, update_round, schedule_prefix)
        for instance, t0 in zip(instances, references):
            for repetition in range(repetitions):
                tasks.append(SolveTask(instance, schedule, params, seed=repetition,
                                       policy=prefix_policy, reference=t0))
    logger.info('Building a %dx%d reward table at round %d (%d solves)',
                len(configs), len(instances), update_round, len(tasks))
    results = run_solves(tasks, n_jobs)

    values = np.zeros((len(configs), len(instances)))
    flagged = np.zeros(values.shape, dtype=bool)
    k = 0
    for i in range(len(configs)):
        for j, t0 in enumerate(references):
            cell = results[k:k + repetitions]
            k += repetitions
            values[i, j], flagged[i, j] = reward_of(cell, t0, params, r_min)
    if flagged.any():
        logger.warning('%d reward cells failed and were set to r_min', int(flagged.sum()))
    return RewardTable(configs, [instance.name for instance in instances], values,
                       update_round, r_min, flagged)
