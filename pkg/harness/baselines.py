"""
The compared methods on one shared test set. Every method is measured against
the same per-instance default reference, computed once.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from bandit.selection import best_arm
from bandit.training import infer_schedule
from bnc.runs import SolveTask, is_failure, run_solves
from bnc.schedule import ConfigSchedule
from metrics.rewards import gap_improvement, rel_improvement
from separators.config import NUM_SEPARATORS, SEPARATOR_NAMES, SeparatorConfig
from .config import EVAL_FLOOR

logger = logging.getLogger(__name__)


@dataclass
class MethodSample:
    method: str
    instance: str
    delta: float
    status: str
    measure: float = None
    gap: float = None
    configs: tuple = ()


@dataclass
class Evaluation:
    objective: str
    strategy: str
    results: dict


@dataclass
class EvalContext:
    params: object
    references: dict
    objective: str = 'time'
    # effort-limited solver params and default gaps of the gap objective
    gap_params: object = None
    reference_gaps: dict = field(default_factory=dict)
    subspace: list = field(default_factory=list)
    subspaces: dict = None
    nets: list = field(default_factory=list)
    states: list = None
    strategy: str = 'point'
    update_rounds: tuple = (0, 5)
    sep_feat: str = 'rich'
    prune: SeparatorConfig = None
    agnostic: SeparatorConfig = None
    seed: int = 0
    n_jobs: int = None

    @property
    def solve_params(self):
        return self.gap_params if self.objective == 'gap' else self.params


def prune_config(default_results):
    """Switch off every separator none of whose cuts was applied under the default schedule."""
    applied = Counter()
    for result in default_results:
        applied.update(result.cuts_applied)
    config = SeparatorConfig.from_names([name for name in SEPARATOR_NAMES if applied[name] > 0])
    logger.info('Prune keeps %s', config.names)
    return config


def instance_agnostic_config(table):
    """The config with the best mean reward over the table; ties go to the lowest bitmask."""
    return best_arm(table.configs, table.values.mean(axis=1))


def gap_limit(default_measures, fraction=0.5):
    return fraction * float(np.median(default_measures))


def schedule_for(method, instance, index, ctx):
    """Schedule a method runs on the index-th test instance; None for the default."""
    if method == 'default':
        return None
    if method == 'random':
        rng = np.random.default_rng([ctx.seed, 1, index])
        return ConfigSchedule.constant(SeparatorConfig(int(rng.integers(1 << NUM_SEPARATORS))))
    if method == 'prune':
        return ConfigSchedule.constant(ctx.prune)
    if method == 'instance_agnostic':
        return ConfigSchedule.constant(ctx.agnostic)
    if method == 'random_within_subspace':
        rng = np.random.default_rng([ctx.seed, 2, index])
        subspace = sorted(ctx.subspace)
        return ConfigSchedule.constant(subspace[int(rng.integers(len(subspace)))])
    if method == 'l2sep':
        return infer_schedule(ctx.nets, instance, ctx.subspace, ctx.strategy, ctx.update_rounds,
                              ctx.params, ctx.states, ctx.sep_feat, ctx.subspaces)
    raise ValueError(f'Unknown method {method!r}.')


def _score(result, instance, ctx):
    if ctx.objective == 'gap':
        if is_failure(result):
            return -1.0
        return gap_improvement(ctx.reference_gaps[instance.name], result.gap)
    if is_failure(result):
        return EVAL_FLOOR
    return max(rel_improvement(ctx.references[instance.name], result.measure(ctx.params.metric)),
               EVAL_FLOOR)


def run_baseline(method, testset, ctx):
    """One sample per test instance; hard-stopped solves are floored at EVAL_FLOOR."""
    schedules = [schedule_for(method, instance, index, ctx) for index, instance in enumerate(testset)]
    if method == 'default':
        return [MethodSample(method, instance.name, 0.0, 'reference',
                             ctx.references.get(instance.name), ctx.reference_gaps.get(instance.name),
                             (SeparatorConfig.all_on(),))
                for instance in testset]
    reference = None if ctx.objective == 'gap' else ctx.references
    tasks = [
        SolveTask(instance, schedule, ctx.solve_params,
                  reference=reference[instance.name] if reference is not None else None)
        for instance, schedule in zip(testset, schedules)
    ]
    results = run_solves(tasks, ctx.n_jobs)
    samples = []
    for instance, schedule, result in zip(testset, schedules, results):
        failed = is_failure(result)
        samples.append(MethodSample(
            method, instance.name, _score(result, instance, ctx),
            'failed' if failed else result.status.value,
            None if failed else result.measure(ctx.params.metric),
            None if failed else result.gap,
            schedule.configs,
        ))
    hard_stops = sum(sample.status == 'hard_stop' for sample in samples)
    if hard_stops:
        logger.warning('%s: %d of %d solves hit the hard stop', method, hard_stops, len(samples))
    return samples


def evaluate_methods(methods, testset, ctx):
    results = {}
    for method in methods:
        logger.info('Evaluating %s on %d instances', method, len(testset))
        results[method] = run_baseline(method, testset, ctx)
    return results
