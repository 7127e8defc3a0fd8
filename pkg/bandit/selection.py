"""Arm selection over a restricted subspace at one update step."""

import numpy as np
from scipy.special import softmax

from model.graph import separator_features
from .ucb import ucb_score


def arm_graphs(graph, configs, sep_feat='rich'):
    """The context graph with each candidate's separator features."""
    return [graph.with_separators(separator_features(config, sep_feat)) for config in configs]


def point_scores(net, graph, configs, sep_feat='rich'):
    return np.array([net.forward(g) for g in arm_graphs(graph, configs, sep_feat)])


def ucb_scores(net, state, graph, configs, sep_feat='rich'):
    return np.array([ucb_score(net, state, g) for g in arm_graphs(graph, configs, sep_feat)])


def best_arm(configs, scores):
    """Highest score; ties go to the lowest bitmask."""
    order = sorted(range(len(configs)), key=lambda i: (-scores[i], configs[i].bits))
    return configs[order[0]]


def draw_without_replacement(scores, count, rng, temperature=1.0):
    """Indices drawn one at a time from the softmax of the remaining scores."""
    remaining = list(range(len(scores)))
    chosen = []
    for _ in range(count):
        weights = softmax(np.asarray([scores[i] for i in remaining]) / temperature)
        pick = remaining[int(rng.choice(len(remaining), p=weights))]
        chosen.append(pick)
        remaining.remove(pick)
    return chosen


def sample_arms(net, state, graph, configs, count, seed, sep_feat='rich', temperature=1.0):
    """
    `count` distinct arms drawn from the softmax of their UCB scores; Z then
    absorbs the gradient outer products of the drawn arms.
    """
    configs = list(configs)
    if count > len(configs):
        raise ValueError(f'Cannot draw {count} arms from {len(configs)}.')
    graphs = arm_graphs(graph, configs, sep_feat)
    values, gradients = [], []
    for g in graphs:
        value, cache = net.trace(g)
        values.append(value)
        gradients.append(net.flatten(net.backward(cache)))
    scores = np.array([v + state.gamma * state.bonus(grad) for v, grad in zip(values, gradients)])
    chosen = draw_without_replacement(scores, count, np.random.default_rng(seed), temperature)
    state.update([gradients[i] for i in chosen])
    return [configs[i] for i in chosen]


def epsilon_greedy_select(net, graph, configs, count, epsilon, seed, sep_feat='rich'):
    """
    `count` picks; each is uniform among the unselected arms with probability
    epsilon and otherwise the best unselected point estimate.
    """
    configs = list(configs)
    if count > len(configs):
        raise ValueError(f'Cannot draw {count} arms from {len(configs)}.')
    rng = np.random.default_rng(seed)
    scores = point_scores(net, graph, configs, sep_feat) if epsilon < 1 else np.zeros(len(configs))
    remaining = list(range(len(configs)))
    chosen = []
    for _ in range(count):
        if rng.random() < epsilon:
            pick = remaining[int(rng.integers(len(remaining)))]
        else:
            pick = min(remaining, key=lambda i: (-scores[i], configs[i].bits))
        chosen.append(pick)
        remaining.remove(pick)
    return [configs[i] for i in chosen]
