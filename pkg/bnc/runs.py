"""Batches of independent solves on a joblib worker pool."""

import logging
from dataclasses import dataclass

import django
from django.apps import apps
from django.conf import settings
from joblib import Parallel, delayed

from core.exceptions import L2SepError
from metrics.rewards import clipped_reward, rel_improvement
from .schedule import default_schedule
from .solver import SolveStatus, solve

logger = logging.getLogger(__name__)


@dataclass
class SolveTask:
    instance: object
    schedule: object
    params: object
    seed: int = 0
    policy: object = None
    reference: float = None
    keep_snapshots: bool = False


def _ensure_django():
    if not apps.ready:
        django.setup()


def run_task(task):
    """Solve one task; failures come back as None so a batch never aborts."""
    _ensure_django()
    try:
        result = solve(task.instance, task.schedule, task.params, seed=task.seed,
                       policy=task.policy, reference_effort=task.reference)
    except (L2SepError, ArithmeticError, ValueError) as exc:
        logger.warning('%s: solve failed: %s', task.instance.name, exc)
        return None
    if not task.keep_snapshots:
        result.snapshots = {}
    return result


def run_solves(tasks, n_jobs=None):
    tasks = list(tasks)
    n_jobs = settings.L2SEP['JOBS'] if n_jobs is None else n_jobs
    if n_jobs == 1 or len(tasks) <= 1:
        return [run_task(task) for task in tasks]
    return Parallel(n_jobs=n_jobs)(delayed(run_task)(task) for task in tasks)


def reference_results(instances, params, n_jobs=None, seed=0):
    """Default-schedule solves; their measure is the shared t_0 of every comparison."""
    tasks = [SolveTask(instance, default_schedule(), params, seed) for instance in instances]
    results = run_solves(tasks, n_jobs)
    for instance, result in zip(instances, results):
        if result is None or result.status == SolveStatus.NUMERICAL_ERROR:
            raise L2SepError(f'{instance.name}: the default solve failed; no reference time.')
    return results


def is_failure(result):
    return result is None or result.status == SolveStatus.NUMERICAL_ERROR


def delta_of(result, t0, metric='effort'):
    return rel_improvement(t0, result.measure(metric))


def reward_of(results, t0, params, r_min=None):
    """
    Clipped reward of l repeated solves against t_0, and a failure flag. If
    any repetition failed, the whole cell is r_min; repetitions are not averaged.
    """
    r_min = settings.L2SEP['R_MIN'] if r_min is None else r_min
    if any(is_failure(result) for result in results):
        return r_min, True
    deltas = [delta_of(result, t0, params.metric) for result in results]
    return clipped_reward(deltas, r_min), False
