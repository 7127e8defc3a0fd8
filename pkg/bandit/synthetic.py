"""
Planted contextual bandit: rewards linear in the activation bits with
per-context weights plus Gaussian noise, so the best arm is known exactly.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from model.graph import CONSTRAINT_FEATURES, VARIABLE_FEATURES, TripletGraph, separator_features
from model.net import Architecture, RewardNet
from model.training import fit
from .selection import arm_graphs, best_arm, epsilon_greedy_select, point_scores, ucb_scores
from .ucb import UcbState


@dataclass(frozen=True)
class PlantedInstance:
    name: str
    kind: int


class PlantedEnvironment:

    def __init__(self, configs, kinds=3, noise=0.05, seed=0, r_min=-1.5, sep_feat='rich'):
        rng = np.random.default_rng(seed)
        self.configs = sorted(configs)
        self.kinds = kinds
        self.noise = noise
        self.r_min = r_min
        self.sep_feat = sep_feat
        self.weights = rng.uniform(-0.5, 0.5, size=(kinds, self.configs[0].width))
        self.rng = np.random.default_rng([seed, 1])

    def instances(self, count, seed=0):
        rng = np.random.default_rng([seed, 2])
        return [PlantedInstance(f'planted-{i}', int(rng.integers(self.kinds))) for i in range(count)]

    def expected(self, instance, config):
        return float(self.weights[instance.kind] @ config.vector())

    def best(self, instance):
        return best_arm(self.configs, [self.expected(instance, c) for c in self.configs])

    def context(self, instance, j, nets):
        variables = np.zeros((4, len(VARIABLE_FEATURES)))
        variables[:, instance.kind] = 1.0
        constraints = np.zeros((3, len(CONSTRAINT_FEATURES)))
        constraints[:, 1] = 1.0
        return TripletGraph(variables, constraints, separator_features(self.configs[0], self.sep_feat),
                            sp.csr_matrix(np.ones((3, 4))))

    def reward(self, instance, config):
        value = self.expected(instance, config) + self.noise * self.rng.normal()
        return max(value, self.r_min)

    def rewards(self, requests, j, nets):
        return [[self.reward(instance, config) for config in configs] for instance, configs in requests]


def run_synthetic_bandit(env, strategy, steps=2000, seed=0, epsilon=0.1, gamma=0.1, lam=1.0,
                         hidden=16, refit_every=50, fit_epochs=2, eval_instances=50):
    """
    One arm per step on a fresh context; returns the cumulative expected
    regret and the final argmax accuracy on held-out contexts.
    """
    rng = np.random.default_rng(seed)
    contexts = env.instances(steps, seed)
    net = RewardNet(Architecture(hidden=hidden, heads=4, dropout=0.0), seed=seed)
    state = UcbState(net, 'diag', gamma, lam)
    samples = []
    regret = 0.0
    for t, instance in enumerate(contexts):
        graph = env.context(instance, 0, [])
        if strategy == 'random':
            choice = env.configs[int(rng.integers(len(env.configs)))]
        elif strategy == 'egreedy':
            choice = epsilon_greedy_select(net, graph, env.configs, 1, epsilon, [seed, t], env.sep_feat)[0]
        else:
            choice = best_arm(env.configs, ucb_scores(net, state, graph, env.configs, env.sep_feat))
        arm = arm_graphs(graph, [choice], env.sep_feat)[0]
        if strategy == 'ucb':
            state.update([net.gradient(arm)])
        samples.append((arm, env.reward(instance, choice)))
        regret += env.expected(instance, env.best(instance)) - env.expected(instance, choice)
        if strategy != 'random' and (t + 1) % refit_every == 0:
            fit(net, samples, fit_epochs, lr=3e-3, batch=32, seed=[seed, t])

    correct = 0
    held_out = env.instances(eval_instances, seed + 1)
    for instance in held_out:
        graph = env.context(instance, 0, [])
        chosen = best_arm(env.configs, point_scores(net, graph, env.configs, env.sep_feat))
        correct += chosen == env.best(instance)
    return {'regret': regret, 'accuracy': correct / len(held_out), 'net': net}
