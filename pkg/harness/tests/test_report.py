import math
import tempfile
from pathlib import Path

import pandas as pd
from django.test import SimpleTestCase

from harness.baselines import Evaluation, MethodSample
from harness.pipeline import read_evaluation, write_json
from harness.report import frequency_frame, heatmap_frame, results_frame, write_report
from harness.serializers import EvaluationSerializer
from separators.config import NUM_SEPARATORS, SeparatorConfig
from subspace.table import RewardTable

A = [SeparatorConfig(3), SeparatorConfig(6), SeparatorConfig(12)]


def samples(method, deltas, configs=None):
    return [
        MethodSample(method, f'x{k}', delta, 'optimal', 10.0, 0.0,
                     configs[k] if configs else (SeparatorConfig.all_on(),))
        for k, delta in enumerate(deltas)
    ]


class ReportTest(SimpleTestCase):
    """Test the plot-ready report tables."""

    def setUp(self):
        l2sep_configs = [(A[0], A[1]), (A[0], A[2]), (A[1], A[1]), (A[0], A[1])]
        self.results = {
            'default': samples('default', [0.0, 0.0, 0.0, 0.0]),
            'random': samples('random', [-0.5, 0.1, 0.2, -3.0]),
            'l2sep': samples('l2sep', [0.4, 0.2, 0.6, 0.0], l2sep_configs),
        }

    def test_results_statistics(self):
        """Test per-method median, IQM, mean and std."""
        frame = results_frame(self.results)
        self.assertEqual(list(frame.index), ['default', 'random', 'l2sep'])
        self.assertAlmostEqual(frame.loc['l2sep', 'median'], 0.3)
        self.assertAlmostEqual(frame.loc['l2sep', 'mean'], 0.3)
        self.assertAlmostEqual(frame.loc['random', 'median'], -0.2)
        self.assertEqual(frame.loc['default', 'std'], 0.0)
        self.assertEqual(frame.loc['l2sep', 'quantity'], 'delta')
        self.assertEqual(results_frame(self.results, 'gap').loc['random', 'quantity'], 'gap_improvement')

    def test_frequencies_sum_to_one(self):
        """Test selection frequencies per update sum to 1."""
        frame = frequency_frame(self.results['l2sep'])
        totals = frame.groupby('update_index')['frequency'].sum()
        self.assertEqual(list(totals.index), [0, 1])
        for total in totals:
            self.assertAlmostEqual(total, 1.0)
        first = frame[frame.update_index == 0].set_index('config')['frequency']
        self.assertAlmostEqual(first[3], 0.75)

    def test_heatmap_shape(self):
        """Test the heatmap has one row per separator and one column per config."""
        frame = heatmap_frame(A)
        self.assertEqual(frame.shape, (NUM_SEPARATORS, len(A)))
        self.assertEqual(list(frame[6]), [0, 1, 1, 0, 0, 0, 0, 0])

    def test_write_report(self):
        """Test every report file is written and the results CSV reads back."""
        table = RewardTable(A, ['a', 'b'], [[0.1, 0.3], [0.4, 0.0], [0.2, 0.2]])
        with tempfile.TemporaryDirectory() as tmp:
            written = write_report(self.results, tmp, subspace=A, table=table,
                                   thresholds=[-math.inf, 0.15], size=2)
            self.assertEqual(set(written), {'results', 'results_text', 'samples', 'default_stats',
                                            'frequencies', 'heatmap', 'tradeoff'})
            frame = pd.read_csv(Path(tmp) / 'results.csv', index_col=0)
            tradeoff = pd.read_csv(written['tradeoff'])
        self.assertAlmostEqual(frame.loc['l2sep', 'median'], 0.3)
        self.assertEqual(len(tradeoff), 4)

    def test_evaluation_round_trip(self):
        """Test the evaluation file groups samples back by method."""
        evaluation = Evaluation('time', 'point', self.results)
        with tempfile.TemporaryDirectory() as tmp:
            write_json(EvaluationSerializer(evaluation).data, Path(tmp) / 'evaluation.json')
            loaded = read_evaluation(Path(tmp) / 'evaluation.json')
        self.assertEqual(list(loaded.results), ['default', 'random', 'l2sep'])
        self.assertEqual(loaded.results['l2sep'], self.results['l2sep'])
