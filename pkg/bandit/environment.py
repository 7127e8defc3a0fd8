"""Reward collection for the bandit: contexts and clipped rewards from real solves."""

import logging

from django.conf import settings

from bnc.runs import SolveTask, reference_results, reward_of, run_solves
from bnc.solver import solve
from core.exceptions import L2SepError
from model.graph import encode
from .policies import ContextCaptured, NetPolicy, placeholder_schedule, root_snapshot

logger = logging.getLogger(__name__)


class SolverEnvironment:
    """
    Contexts are the LP state at update round n_j with the earlier updates
    decided by the frozen nets; the reward of config s holds s from n_j to the
    end of the solve and is clipped against the default-schedule reference.
    """

    def __init__(self, params, update_rounds, configs, sep_feat='rich', repetitions=1,
                 r_min=None, n_jobs=None, subspaces=None):
        self.params = params
        self.update_rounds = tuple(update_rounds)
        self.configs = sorted(configs)
        self.sep_feat = sep_feat
        self.repetitions = repetitions
        self.r_min = settings.L2SEP['R_MIN'] if r_min is None else r_min
        self.n_jobs = n_jobs
        self.subspaces = subspaces or {}
        self.references = {}

    def reference(self, instance):
        if instance.name not in self.references:
            self.prepare([instance])
        return self.references[instance.name]

    def prepare(self, instances):
        """Default-schedule reference measures of every instance not seen yet."""
        missing = [instance for instance in instances if instance.name not in self.references]
        if missing:
            for instance, result in zip(missing, reference_results(missing, self.params, self.n_jobs)):
                self.references[instance.name] = result.measure(self.params.metric)

    def context(self, instance, j, nets):
        policy = NetPolicy(instance, nets[:j], self.configs, self.sep_feat, capture_at=j,
                           subspaces=self.subspaces)
        try:
            solve(instance, placeholder_schedule(self.update_rounds[:j + 1]), self.params,
                  policy=policy, reference_effort=self.reference(instance))
            snapshot = root_snapshot(instance)
            logger.info('%s: update %d is never reached; using the root LP context', instance.name, j)
        except ContextCaptured as captured:
            snapshot = captured.snapshot
        if snapshot is None:
            raise L2SepError(f'{instance.name}: no LP context (infeasible relaxation).')
        return encode(instance, snapshot, self.configs[0], self.sep_feat)

    def tasks(self, instance, j, nets, config):
        schedule = placeholder_schedule(self.update_rounds[:j + 1], last=config)
        policy = (NetPolicy(instance, nets[:j], self.configs, self.sep_feat, subspaces=self.subspaces)
                  if j else None)
        return [
            SolveTask(instance, schedule, self.params, seed=repetition, policy=policy,
                      reference=self.reference(instance))
            for repetition in range(self.repetitions)
        ]

    def rewards(self, requests, j, nets):
        """Clipped rewards for [(instance, [configs])]; failed solves count as r_min."""
        self.prepare([instance for instance, _ in requests])
        tasks = [
            task
            for instance, configs in requests
            for config in configs
            for task in self.tasks(instance, j, nets, config)
        ]
        results = run_solves(tasks, self.n_jobs)
        rewards = []
        k = 0
        for instance, configs in requests:
            values = []
            for _ in configs:
                cell = results[k:k + self.repetitions]
                k += self.repetitions
                values.append(reward_of(cell, self.references[instance.name], self.params, self.r_min)[0])
            rewards.append(values)
        return rewards
