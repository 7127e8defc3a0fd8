import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from bandit import training
from bandit.config import TrainRunConfig
from bandit.environment import SolverEnvironment
from bandit.synthetic import PlantedEnvironment, run_synthetic_bandit
from bandit.training import architecture_for, forward_training, infer_schedule, neural_ucb_train
from bnc.params import BnCParams
from instances.generators import generate_packing
from model.graph import TripletGraph
from model.net import Architecture, RewardNet
from separators.config import SeparatorConfig

ARMS = [SeparatorConfig(bits) for bits in (0b0001, 0b0110, 0b1011, 0b1111)]


def small_run(**overrides):
    values = dict(epochs=3, instances_per_epoch=2, configs_per_instance=3, steps=1,
                  update_rounds=(0,), hidden=8, fit_epochs=1, batch=8)
    values.update(overrides)
    return TrainRunConfig(**values)


class NeuralUcbTrainTest(SimpleTestCase):
    """Test one update step of neural UCB training on the planted bandit."""

    def setUp(self):
        self.env = PlantedEnvironment(ARMS, seed=2)
        self.instances = self.env.instances(10)

    def test_buffer_growth(self):
        """Test the buffer grows by P x D per epoch and is persisted."""
        run_cfg = small_run()
        net = RewardNet(architecture_for(run_cfg), seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            step = neural_ucb_train(self.instances, ARMS, net, [], run_cfg, self.env, seed=0,
                                    metrics_path=Path(tmp) / 'metrics.jsonl')
            metrics = (Path(tmp) / 'metrics.jsonl').read_text().splitlines()
        self.assertEqual(len(step.buffer), 3 * 2 * 3)
        self.assertEqual([m['buffer_size'] for m in step.metrics], [6, 12, 18])
        self.assertEqual(len(metrics), 3)
        self.assertTrue(all(entry.config in ARMS for entry in step.buffer.entries))
        self.assertTrue(all(r >= self.env.r_min for r in step.buffer.rewards()))

    def test_single_arm(self):
        """Test a one-arm subspace reduces to regression on that arm."""
        run_cfg = small_run(configs_per_instance=1)
        net = RewardNet(architecture_for(run_cfg), seed=0)
        step = neural_ucb_train(self.instances, ARMS[:1], net, [], run_cfg, self.env, seed=1)
        self.assertEqual({entry.config for entry in step.buffer.entries}, {ARMS[0]})

    def test_egreedy_and_restart(self):
        """Test the epsilon-greedy strategy with full refits collects the same volume."""
        run_cfg = small_run(strategy='egreedy', refit='restart')
        net = RewardNet(architecture_for(run_cfg), seed=0)
        step = neural_ucb_train(self.instances, ARMS, net, [], run_cfg, self.env, seed=0)
        self.assertEqual(len(step.buffer), 18)
        self.assertTrue(np.all(np.isfinite(net.flat())))

    def test_binary_separator_features(self):
        """Test the bit-only separator encoding sizes the network accordingly."""
        run_cfg = small_run(sep_feat='binary')
        env = PlantedEnvironment(ARMS, seed=2, sep_feat='binary')
        net = RewardNet(architecture_for(run_cfg), seed=0)
        self.assertEqual(net.architecture.separator_dim, 1)
        step = neural_ucb_train(env.instances(5), ARMS, net, [], run_cfg, env, seed=0)
        self.assertEqual(step.buffer.graphs[0].separators.shape, (8, 1))


class ForwardTrainingTest(SimpleTestCase):
    """Test sequential training of the per-update networks."""

    def test_single_step_matches_neural_ucb(self):
        """Test k = 1 gives the same network as one neural UCB run."""
        run_cfg = small_run()
        env = PlantedEnvironment(ARMS, seed=5)
        steps = forward_training(env.instances(10), ARMS, run_cfg, env, seed=3)
        env = PlantedEnvironment(ARMS, seed=5)
        net = RewardNet(architecture_for(run_cfg), seed=3)
        alone = neural_ucb_train(env.instances(10), ARMS, net, [], run_cfg, env, seed=3)
        self.assertEqual(len(steps), 1)
        np.testing.assert_array_equal(steps[0].net.flat(), alone.net.flat())

    def test_earlier_nets_frozen(self):
        """Test net 1 is bit-identical before and after net 2 is trained."""
        run_cfg = small_run(steps=2, update_rounds=(0, 5))
        env = PlantedEnvironment(ARMS, seed=5)
        snapshots = []
        original = training.neural_ucb_train

        def recording(instances, configs, net, prev_nets, *args, **kwargs):
            snapshots.append([prev.flat().copy() for prev in prev_nets])
            return original(instances, configs, net, prev_nets, *args, **kwargs)

        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch('bandit.training.neural_ucb_train', side_effect=recording):
                steps = forward_training(env.instances(10), ARMS, run_cfg, env, seed=0,
                                         buffer_dir=tmp)
            self.assertTrue((Path(tmp) / 'buffer_1.jsonl').exists())
        self.assertEqual(len(steps), 2)
        self.assertEqual(len(snapshots[1]), 1)
        np.testing.assert_array_equal(snapshots[1][0], steps[0].net.flat())
        self.assertTrue(all(entry.update_index == 1 for entry in steps[1].buffer.entries))


class SolverEnvironmentTest(SimpleTestCase):
    """Test contexts and rewards collected from real solves."""

    def setUp(self):
        self.instance = generate_packing(4, 3, 21)
        self.env = SolverEnvironment(BnCParams(), (0, 5), ARMS + [SeparatorConfig.all_on()], n_jobs=1)

    def test_default_config_scores_zero(self):
        """Test holding the default all-on config from round 0 earns reward 0."""
        rewards = self.env.rewards([(self.instance, [SeparatorConfig.all_on(), ARMS[0]])], 0, [])
        self.assertEqual(rewards[0][0], 0.0)
        self.assertGreaterEqual(rewards[0][1], self.env.r_min)

    def test_contexts(self):
        """Test contexts at both updates are encoded triplet graphs."""
        net = RewardNet(Architecture(hidden=8, heads=4, dropout=0.0))
        for j, nets in ((0, []), (1, [net])):
            graph = self.env.context(self.instance, j, nets)
            self.assertIsInstance(graph, TripletGraph)
            self.assertEqual(graph.dims, (17, 33, 9))


class InferScheduleTest(SimpleTestCase):
    """Test schedules chosen by trained networks."""

    def setUp(self):
        self.instance = generate_packing(4, 3, 22)
        self.nets = [RewardNet(Architecture(hidden=8, heads=4, dropout=0.0), seed=j) for j in range(2)]

    def test_single_config(self):
        """Test a one-config subspace is used at every update."""
        schedule = infer_schedule(self.nets, self.instance, ARMS[1:2], update_rounds=(0, 5),
                                  params=BnCParams())
        self.assertEqual(schedule.updates, ((0, ARMS[1]), (5, ARMS[1])))

    def test_zero_net_ties(self):
        """Test an all-zero network picks the lowest bitmask everywhere."""
        for net in self.nets:
            net.zero()
        schedule = infer_schedule(self.nets, self.instance, list(reversed(ARMS)),
                                  update_rounds=(0, 5), params=BnCParams())
        self.assertEqual(schedule.configs, (ARMS[0], ARMS[0]))
        self.assertEqual(schedule.update_rounds, (0, 5))


@tag('slow')
class SyntheticBanditTest(SimpleTestCase):
    """Test neural UCB against baselines on a planted linear-reward bandit."""

    def test_regret_and_accuracy(self):
        """Test UCB regret is at most half of random and the final argmax is 90% right."""
        configs = sorted(SeparatorConfig(int(bits)) for bits in
                         np.random.default_rng(11).choice(256, size=10, replace=False))
        results = {}
        for strategy in ('ucb', 'egreedy', 'random'):
            env = PlantedEnvironment(configs, kinds=3, noise=0.05, seed=7)
            results[strategy] = run_synthetic_bandit(env, strategy, steps=2000, seed=0)
        self.assertLessEqual(results['ucb']['regret'], 0.5 * results['random']['regret'])
        self.assertGreaterEqual(results['ucb']['accuracy'], 0.9)
        self.assertLessEqual(results['egreedy']['regret'], results['random']['regret'])
