import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from bandit.buffer import BanditBuffer, read_buffer
from bandit.config import TrainRunConfig, TrainRunConfigSerializer, update_rounds_for
from bandit.synthetic import PlantedEnvironment, PlantedInstance
from core.exceptions import ConfigurationError
from separators.config import SeparatorConfig


class TrainRunConfigTest(SimpleTestCase):
    """Test bandit run settings."""

    def test_defaults(self):
        """Test the default run collects 70 x 6 x 8 rewards per update."""
        config = TrainRunConfig().validate(12)
        self.assertEqual(config.epochs * config.instances_per_epoch * config.configs_per_instance, 3360)
        self.assertEqual(config.update_rounds, (0, 5))

    def test_update_rounds_by_family(self):
        """Test the second update is round 5 for Tang classes and 8 for Ecole classes."""
        self.assertEqual(update_rounds_for('packing'), (0, 5))
        self.assertEqual(update_rounds_for('indep_set'), (0, 8))
        self.assertEqual(update_rounds_for('max_cut', 3), (0, 5, 12))
        self.assertEqual(update_rounds_for('comb_auction', 1), (0,))
        with self.assertRaises(ConfigurationError):
            update_rounds_for('packing', 4)

    def test_invalid_runs(self):
        """Test D above |A|, mismatched round counts and non-increasing rounds."""
        with self.assertRaises(ConfigurationError):
            TrainRunConfig().validate(4)
        with self.assertRaises(ConfigurationError):
            TrainRunConfig(steps=3).validate()
        with self.assertRaises(ConfigurationError):
            TrainRunConfig(update_rounds=(5, 5)).validate()

    def test_serializer(self):
        """Test a partial document fills defaults and rounds from the step count."""
        serializer = TrainRunConfigSerializer(data={'epochs': 3, 'steps': 3, 'strategy': 'egreedy'},
                                              context={'class_tag': 'packing'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        config = serializer.save()
        self.assertEqual((config.epochs, config.update_rounds, config.strategy), (3, (0, 5, 12), 'egreedy'))
        self.assertEqual(TrainRunConfigSerializer(config).data['update_rounds'], [0, 5, 12])

    def test_serializer_rounds_follow_class_family(self):
        """Test missing update rounds come from the class family and are required without a class."""
        for class_tag, expected in (('max_cut', (0, 5)), ('indep_set', (0, 8)), ('comb_auction', (0, 8))):
            serializer = TrainRunConfigSerializer(data={}, context={'class_tag': class_tag})
            self.assertTrue(serializer.is_valid(), serializer.errors)
            self.assertEqual(serializer.save().update_rounds, expected)
        serializer = TrainRunConfigSerializer(data={'steps': 3}, context={'class_tag': 'indep_set'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().update_rounds, (0, 8, 20))
        serializer = TrainRunConfigSerializer(data={'steps': 2, 'update_rounds': [0, 3]},
                                              context={'class_tag': 'indep_set'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().update_rounds, (0, 3))
        serializer = TrainRunConfigSerializer(data={'epochs': 3})
        self.assertFalse(serializer.is_valid())
        self.assertIn('update_rounds', serializer.errors)

    def test_serializer_errors(self):
        """Test field-keyed errors for bad values."""
        serializer = TrainRunConfigSerializer(data={'lam': 0, 'strategy': 'thompson', 'hidden': 10})
        self.assertFalse(serializer.is_valid())
        self.assertIn('strategy', serializer.errors)
        serializer = TrainRunConfigSerializer(data={'lam': -1.0})
        self.assertFalse(serializer.is_valid())
        self.assertIn('lam', serializer.errors)


class BanditBufferTest(SimpleTestCase):
    """Test the append-only reward buffer."""

    def setUp(self):
        env = PlantedEnvironment([SeparatorConfig(3)])
        self.graph = env.context(PlantedInstance('p', 0), 0, [])

    def test_jsonl_records(self):
        """Test every append lands as one JSON line that reads back."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'buffers' / 'buffer_0.jsonl'
            buffer = BanditBuffer(path=path, r_min=-1.5)
            buffer.append('a', 0, SeparatorConfig(3), self.graph, 0.25)
            buffer.append('b', 1, SeparatorConfig(5), self.graph, -1.5)
            lines = path.read_text().splitlines()
            entries = read_buffer(path)
        self.assertEqual(len(lines), 2)
        self.assertEqual(json.loads(lines[0])['config'], 3)
        self.assertEqual(entries, buffer.entries)
        self.assertEqual(buffer.rewards(), [0.25, -1.5])
        self.assertEqual(len(buffer.samples()), 2)

    def test_rejects_unclipped_reward(self):
        """Test rewards below r_min are refused."""
        buffer = BanditBuffer(r_min=-1.5)
        with self.assertRaises(ConfigurationError):
            buffer.append('a', 0, SeparatorConfig(3), self.graph, -2.0)
        self.assertEqual(len(buffer), 0)

    def test_bad_line(self):
        """Test a malformed record names the file and line."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'buffer.jsonl'
            path.write_text(json.dumps({'instance': 'a', 'update_index': -1}) + '\n')
            with self.assertRaisesRegex(ConfigurationError, 'buffer.jsonl:1'):
                read_buffer(path)
