import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from bnc.schedule import ConfigSchedule
from bnc.solver import solve
from model.net import Architecture, RewardNet
from model.training import Adam, fit
from separators.config import NUM_SEPARATORS
from .buffer import BanditBuffer
from .policies import NetPolicy, placeholder_schedule, root_snapshot
from .selection import arm_graphs, epsilon_greedy_select, sample_arms
from .ucb import UcbState

logger = logging.getLogger(__name__)


@dataclass
class TrainedStep:
    net: RewardNet
    state: UcbState
    buffer: BanditBuffer
    metrics: list = field(default_factory=list)


def architecture_for(run_cfg):
    return Architecture(separator_dim=NUM_SEPARATORS + 1 if run_cfg.sep_feat == 'rich' else 1,
                        hidden=run_cfg.hidden)


def _log_metrics(metrics, path):
    logger.info(json.dumps(metrics))
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('a') as stream:
            stream.write(json.dumps(metrics) + '\n')


def neural_ucb_train(instances, configs, net, prev_nets, run_cfg, env, seed, buffer=None,
                     metrics_path=None):
    """
    Train the net for update j = len(prev_nets). Each epoch draws P instances,
    samples D arms per instance, collects their clipped rewards with the
    earlier updates decided by `prev_nets`, and refits on the whole buffer.
    """
    configs = sorted(configs)
    run_cfg.validate(len(configs))
    j = len(prev_nets)
    state = UcbState(net, run_cfg.ucb_z, run_cfg.gamma, run_cfg.lam)
    buffer = buffer if buffer is not None else BanditBuffer()
    optimizer = Adam(net, run_cfg.lr)
    step = TrainedStep(net, state, buffer)
    count = run_cfg.instances_per_epoch
    logger.info('Training update %d (round %d) on %d instances, |A|=%d, seed %s',
                j, run_cfg.update_rounds[j], len(instances), len(configs), seed)

    for epoch in range(run_cfg.epochs):
        rng = np.random.default_rng([seed, j, epoch])
        picks = rng.choice(len(instances), size=count, replace=count > len(instances))
        requests, contexts = [], []
        for k, index in enumerate(picks):
            instance = instances[int(index)]
            graph = env.context(instance, j, prev_nets)
            if run_cfg.strategy == 'egreedy':
                arms = epsilon_greedy_select(net, graph, configs, run_cfg.configs_per_instance,
                                             run_cfg.epsilon, [seed, j, epoch, k], run_cfg.sep_feat)
            else:
                arms = sample_arms(net, state, graph, configs, run_cfg.configs_per_instance,
                                   [seed, j, epoch, k], run_cfg.sep_feat)
            requests.append((instance, arms))
            contexts.append(graph)

        rewards = env.rewards(requests, j, prev_nets)
        for (instance, arms), graph, values in zip(requests, contexts, rewards):
            for config, arm, reward in zip(arms, arm_graphs(graph, arms, run_cfg.sep_feat), values):
                buffer.append(instance.name, j, config, arm, reward)

        if run_cfg.refit == 'restart':
            net.params = RewardNet(net.architecture, seed=seed + epoch + 1).params
            optimizer = Adam(net, run_cfg.lr)
        history = fit(net, buffer.samples(), run_cfg.fit_epochs, run_cfg.lr, run_cfg.batch,
                      seed=[seed, j, epoch], optimizer=optimizer)
        metrics = {
            'update_index': j,
            'epoch': epoch,
            'buffer_size': len(buffer),
            'mean_reward': float(np.mean([r for values in rewards for r in values])),
            'loss': history[-1],
        }
        step.metrics.append(metrics)
        _log_metrics(metrics, metrics_path)
    return step


def forward_training(instances, configs, run_cfg, env, seed, metrics_path=None, buffer_dir=None):
    """
    Train one net per update step in order; the nets of earlier steps are
    frozen and decide their updates while later nets collect rewards.
    """
    run_cfg.validate(len(configs))
    steps = []
    for j in range(run_cfg.steps):
        net = RewardNet(architecture_for(run_cfg), seed=seed + j)
        buffer_path = Path(buffer_dir) / f'buffer_{j}.jsonl' if buffer_dir is not None else None
        buffer = BanditBuffer(path=buffer_path)
        frozen = [step.net for step in steps]
        steps.append(neural_ucb_train(instances, configs, net, frozen, run_cfg, env, seed,
                                      buffer=buffer, metrics_path=metrics_path))
    return steps


def infer_schedule(nets, instance, configs, strategy='point', update_rounds=(0, 5), params=None,
                   states=None, sep_feat='rich', subspaces=None):
    """
    Schedule chosen by the nets along the solve they drive: at update j the
    LP state at round n_j is encoded and the argmax of the chosen score over
    the subspace (or that update's own entry in `subspaces`) is held until
    the next update. Updates the solve never reaches are decided from the
    root LP.
    """
    configs = sorted(configs)
    rounds = tuple(update_rounds)[:len(nets)]
    policy = NetPolicy(instance, nets, configs, sep_feat, strategy, states, subspaces=subspaces)
    solve(instance, placeholder_schedule(rounds), params, policy=policy)
    missing = [j for j in range(len(rounds)) if j not in policy.choices]
    if missing:
        snapshot = root_snapshot(instance)
        for j in missing:
            policy.choices[j] = (policy.choose(j, snapshot) if snapshot is not None
                                 else policy.configs_at(j)[0])
    return ConfigSchedule.from_configs(rounds, [policy.choices[j] for j in range(len(rounds))])
