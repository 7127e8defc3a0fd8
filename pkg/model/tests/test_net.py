import tempfile
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from django.test import SimpleTestCase, tag

from core.exceptions import CheckpointMismatchError, EmptyBufferError
from model.checkpoint import load_net, save_net
from model.graph import TripletGraph, separator_features
from model.net import Architecture, RewardNet
from model.training import buffer_loss, fit
from separators.config import SeparatorConfig

SMALL = Architecture(hidden=8, heads=4, dropout=0.0)


def random_graph(rng, config=None, n=6, m=4):
    config = config or SeparatorConfig(int(rng.integers(256)))
    return TripletGraph(
        variables=rng.normal(size=(n, 17)),
        constraints=rng.normal(size=(m, 33)),
        separators=separator_features(config),
        edges=sp.random(m, n, density=0.5, format='csr', random_state=rng) + sp.eye(m, n, format='csr'),
    )


class ForwardTest(SimpleTestCase):
    """Test the reward network's forward pass."""

    def setUp(self):
        self.rng = np.random.default_rng(0)
        self.net = RewardNet(Architecture(hidden=16, heads=4), seed=1)
        self.graph = random_graph(self.rng)

    def test_deterministic_without_dropout(self):
        """Test evaluation mode returns the same finite value twice."""
        first = self.net.forward(self.graph)
        self.assertTrue(np.isfinite(first))
        self.assertEqual(first, self.net.forward(self.graph))

    def test_dropout_only_in_training(self):
        """Test training mode varies with the dropout seed."""
        values = {self.net.forward(self.graph, train=True, seed=seed) for seed in range(5)}
        self.assertGreater(len(values), 1)

    def test_permutation_invariance(self):
        """Test reordering variable and constraint nodes leaves the output unchanged."""
        permuted = self.graph.permuted(self.rng.permutation(6), self.rng.permutation(4))
        self.assertAlmostEqual(self.net.forward(self.graph), self.net.forward(permuted), places=10)

    def test_zero_net(self):
        """Test an all-zero network outputs 0."""
        self.net.zero()
        self.assertEqual(self.net.forward(self.graph), 0.0)

    def test_activation_bit_matters(self):
        """Test flipping one activation bit changes the output."""
        config = SeparatorConfig(0b1011)
        base = random_graph(self.rng, config)
        flipped = base.with_separators(separator_features(config.flip(2)))
        self.assertGreater(abs(self.net.forward(base) - self.net.forward(flipped)), 0)

    def test_dimension_check(self):
        """Test a graph with binary separator features is refused by a rich-feature net."""
        graph = self.graph.with_separators(separator_features(SeparatorConfig(3), 'binary'))
        with self.assertRaises(ValueError):
            self.net.forward(graph)


class GradientTest(SimpleTestCase):
    """Test the hand-written backward pass."""

    def test_finite_differences(self):
        """Test gradients against central differences on 20 random nets and graphs."""
        rng = np.random.default_rng(2)
        step = 1e-5
        for trial in range(20):
            net = RewardNet(SMALL, seed=trial)
            graph = random_graph(rng)
            gradient = net.gradient(graph)
            theta = net.flat()
            coords = rng.choice(net.param_count, size=40, replace=False)
            center = net.forward(graph)
            kept, numeric = [], []
            for index in coords:
                shifted = theta.copy()
                shifted[index] += step
                net.set_flat(shifted)
                upper = net.forward(graph)
                shifted[index] -= 2 * step
                net.set_flat(shifted)
                lower = net.forward(graph)
                # one-sided slopes disagree only when a rectifier kink lies inside the interval
                if abs((upper - center) - (center - lower)) / step > 1e-3:
                    continue
                kept.append(index)
                numeric.append((upper - lower) / (2 * step))
            net.set_flat(theta)
            self.assertGreaterEqual(len(kept), 35)
            numeric = np.array(numeric)
            scale = max(np.linalg.norm(numeric), 1e-8)
            self.assertLessEqual(np.linalg.norm(gradient[kept] - numeric) / scale, 1e-4)

    def test_length(self):
        """Test the gradient has one entry per parameter."""
        net = RewardNet(SMALL)
        self.assertEqual(len(net.gradient(random_graph(np.random.default_rng(3)))), net.param_count)

    def test_zero_net_bias(self):
        """Test the gradient of a zero net w.r.t. the output bias is 1."""
        net = RewardNet(SMALL)
        net.zero()
        gradient = net.gradient(random_graph(np.random.default_rng(4)))
        self.assertEqual(gradient[net.slice_of('head_b2')].tolist(), [1.0])
        self.assertEqual(np.count_nonzero(gradient), 1)


class FitTest(SimpleTestCase):
    """Test regression onto clipped rewards."""

    def test_empty_buffer(self):
        """Test an empty buffer is rejected."""
        with self.assertRaises(EmptyBufferError):
            fit(RewardNet(SMALL), [], epochs=1)

    def test_constant_target(self):
        """Test a constant target is fitted almost exactly."""
        rng = np.random.default_rng(5)
        samples = [(random_graph(rng), 0.3) for _ in range(16)]
        net = RewardNet(SMALL, seed=5)
        history = fit(net, samples, epochs=300, lr=1e-2, batch=8, seed=0)
        self.assertLess(history[-1], history[0])
        self.assertLess(buffer_loss(net, samples), 1e-3)

    def test_zero_loss_at_exact_fit(self):
        """Test the loss is zero when predictions equal the rewards."""
        rng = np.random.default_rng(6)
        net = RewardNet(SMALL)
        graphs = [random_graph(rng) for _ in range(3)]
        self.assertEqual(buffer_loss(net, [(g, net.forward(g)) for g in graphs]), 0.0)

    @tag('slow')
    def test_planted_linear_rule(self):
        """Test rewards linear in the activation bits are learned from 200 samples."""
        rng = np.random.default_rng(7)
        weights = rng.uniform(-0.5, 0.5, size=8)
        samples = []
        for _ in range(200):
            config = SeparatorConfig(int(rng.integers(256)))
            samples.append((random_graph(rng, config), float(weights @ config.vector())))
        net = RewardNet(Architecture(hidden=16, heads=4, dropout=0.0), seed=7)
        history = fit(net, samples, epochs=200, lr=3e-3, batch=64, seed=0)
        self.assertLessEqual(history[-1], history[0] / 10)
        self.assertLess(buffer_loss(net, samples), 1e-2)


class CheckpointTest(SimpleTestCase):
    """Test saving and loading networks."""

    def test_round_trip(self):
        """Test a reloaded network gives bit-identical outputs."""
        rng = np.random.default_rng(8)
        net = RewardNet(SMALL, seed=8)
        net.fit_stats([random_graph(rng) for _ in range(3)])
        graph = random_graph(rng)
        with tempfile.TemporaryDirectory() as tmp:
            save_net(net, Path(tmp) / 'net.json')
            loaded = load_net(Path(tmp) / 'net.json', SMALL)
        self.assertEqual(loaded.forward(graph), net.forward(graph))
        self.assertTrue(loaded.stats_frozen)

    def test_architecture_mismatch(self):
        """Test loading into a different architecture is refused."""
        with tempfile.TemporaryDirectory() as tmp:
            save_net(RewardNet(SMALL), Path(tmp) / 'net.json')
            with self.assertRaises(CheckpointMismatchError):
                load_net(Path(tmp) / 'net.json', Architecture(hidden=16, heads=4))

    def test_tampered_hash(self):
        """Test a hash that does not match the stored architecture is refused."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'net.json'
            save_net(RewardNet(SMALL), path)
            path.write_text(path.read_text().replace(SMALL.digest(), '0' * 64))
            with self.assertRaises(CheckpointMismatchError):
                load_net(path)
