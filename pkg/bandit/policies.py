"""Solver policies that pick the configuration at each update from trained nets."""

import logging

from bnc.schedule import ConfigSchedule
from bnc.solver import LpSnapshot
from lp.problem import LpProblem
from lp.simplex import solve_lp
from model.graph import encode
from separators.config import SeparatorConfig
from .selection import best_arm, point_scores, ucb_scores

logger = logging.getLogger(__name__)


class ContextCaptured(Exception):
    """Raised from inside a solve to hand back the LP state at an update."""

    def __init__(self, snapshot):
        self.snapshot = snapshot
        super().__init__(f'captured round {snapshot.round_index}')


def placeholder_schedule(update_rounds, last=None):
    """All-on at every update round; policies or `last` replace the configs."""
    configs = [SeparatorConfig.all_on()] * len(update_rounds)
    if last is not None:
        configs[-1] = last
    return ConfigSchedule.from_configs(update_rounds, configs)


def root_snapshot(instance):
    """LP state of the plain relaxation, for updates a solve never reaches."""
    problem = LpProblem.from_instance(instance)
    solution = solve_lp(problem)
    if not solution.is_optimal:
        return None
    return LpSnapshot(0, 0, problem, solution, [])


class NetPolicy:
    """
    Update j is decided by nets[j] (argmax of its point or UCB score over the
    subspace); updates past the last net keep the scheduled config. `subspaces`
    maps update indices to their own subspace when it differs from `configs`.
    With `capture_at`, the solve is aborted at that update with the LP state.
    """

    def __init__(self, instance, nets, configs, sep_feat='rich', strategy='point', states=None,
                 capture_at=None, subspaces=None):
        self.instance = instance
        self.nets = list(nets)
        self.configs = sorted(configs)
        self.sep_feat = sep_feat
        self.strategy = strategy
        self.states = states
        self.capture_at = capture_at
        self.subspaces = {j: sorted(configs) for j, configs in (subspaces or {}).items()}
        self.choices = {}

    def configs_at(self, j):
        return self.subspaces.get(j, self.configs)

    def choose(self, j, snapshot):
        configs = self.configs_at(j)
        graph = encode(self.instance, snapshot, configs[0], self.sep_feat)
        if self.strategy == 'ucb':
            scores = ucb_scores(self.nets[j], self.states[j], graph, configs, self.sep_feat)
        else:
            scores = point_scores(self.nets[j], graph, configs, self.sep_feat)
        return best_arm(configs, scores)

    def __call__(self, j, snapshot):
        if self.capture_at is not None and j == self.capture_at:
            raise ContextCaptured(snapshot)
        if j >= len(self.nets):
            return None
        if len(self.configs_at(j)) == 1:
            config = self.configs_at(j)[0]
        else:
            config = self.choose(j, snapshot)
        self.choices[j] = config
        logger.debug('%s: update %d -> %s', self.instance.name, j, config)
        return config
