import math

import numpy as np
from django.test import SimpleTestCase

from separators.cuts import (
    MAX_AGE, Cut, CutPool, cut_efficacy, make_cut, objective_parallelism, parallelism,
    select_cuts,
)


def cut(values, rhs, origin='test'):
    values = np.asarray(values, dtype=float)
    indices = np.flatnonzero(values)
    return Cut(indices, values[indices], float(rhs), origin)


class CutMeasureTest(SimpleTestCase):
    """Test efficacy and parallelism measures."""

    def test_efficacy_is_euclidean_violation(self):
        """Test efficacy is (a x - b) / ||a||."""
        c = cut([1, 1], 1)
        self.assertAlmostEqual(cut_efficacy(c, np.array([1.0, 1.0])), 1 / math.sqrt(2))
        self.assertLess(cut_efficacy(c, np.array([0.0, 0.0])), 0)

    def test_parallelism_of_scaled_cuts(self):
        """Test a cut is fully parallel to any positive multiple of itself."""
        c = cut([1, 2, 0], 3)
        self.assertAlmostEqual(parallelism(c, c.scaled(4.0)), 1.0)
        self.assertAlmostEqual(parallelism(c, cut([0, 0, 1], 1)), 0.0)

    def test_objective_parallelism_sign(self):
        """Test a cut whose normal opposes the minimization objective scores positive."""
        objective = np.array([-1.0, -1.0])
        self.assertAlmostEqual(objective_parallelism(cut([1, 1], 1), objective), 1.0)
        self.assertAlmostEqual(objective_parallelism(cut([-1, -1], 1), objective), -1.0)


class MakeCutTest(SimpleTestCase):
    """Test make_cut filters and cleans raw inequalities."""

    lower = np.zeros(3)
    upper = np.ones(3)

    def test_satisfied_inequality_is_dropped(self):
        """Test a cut not violated by x_lp is not returned."""
        self.assertIsNone(make_cut([1, 1, 0], 2, 'test', np.array([0.5, 0.5, 0]),
                                   self.lower, self.upper))

    def test_tiny_coefficient_relaxes_rhs(self):
        """Test coefficients below the drop tolerance are removed with a bound."""
        result = make_cut([1, 1, -1e-12], 1, 'test', np.array([0.8, 0.8, 0.5]),
                          self.lower, self.upper)
        self.assertEqual(result.indices.tolist(), [0, 1])
        self.assertAlmostEqual(result.rhs, 1 + 1e-12)

    def test_high_dynamism_is_rejected(self):
        """Test cuts with a huge coefficient ratio are discarded."""
        self.assertIsNone(make_cut([1e9, 1e-1, 0], 0.5, 'test', np.array([1, 1, 0]),
                                   self.lower, self.upper))

    def test_empty_cut(self):
        """Test an all-zero inequality yields no cut."""
        self.assertIsNone(make_cut([0, 0, 0], -1, 'test', np.zeros(3), self.lower, self.upper))


class SelectCutsTest(SimpleTestCase):
    """Test greedy cut selection."""

    def test_empty_pool(self):
        """Test selecting from an empty pool returns nothing."""
        self.assertEqual(select_cuts(CutPool(), np.zeros(2)), [])

    def test_identical_cuts_select_one(self):
        """Test duplicates are filtered by the parallelism threshold."""
        pool = CutPool()
        pool.add([cut([1, 1], 1), cut([1, 1], 1)])
        selected = select_cuts(pool, np.array([1.0, 1.0]))
        self.assertEqual(len(selected), 1)
        self.assertEqual(pool.applied['test'], 1)

    def test_top_two_by_score(self):
        """Test the two highest scoring of five orthogonal cuts are selected."""
        pool = CutPool()
        x = np.ones(5)
        # efficacies 0.1 .. 0.5 on unit vectors
        for k in range(5):
            values = np.zeros(5)
            values[k] = 1.0
            pool.add([cut(values, 1 - 0.1 * (k + 1), origin=f'sep{k}')])
        selected = select_cuts(pool, x, max_cuts=2)
        self.assertEqual([c.origin for c in selected], ['sep4', 'sep3'])

    def test_unselected_cuts_age_out(self):
        """Test pending cuts leave the pool view after MAX_AGE rounds."""
        pool = CutPool()
        pool.add([cut([1, 0], 2)])
        for _ in range(MAX_AGE):
            select_cuts(pool, np.array([1.0, 0.0]))
        self.assertEqual(len(pool.pending()), 1)
        select_cuts(pool, np.array([1.0, 0.0]))
        self.assertEqual(pool.pending(), [])

    def test_satisfied_cuts_not_selected(self):
        """Test cuts satisfied at the new point are skipped."""
        pool = CutPool()
        pool.add([cut([1, 1], 3)])
        self.assertEqual(select_cuts(pool, np.array([1.0, 1.0])), [])

    def test_negative_max_cuts(self):
        """Test a negative budget is rejected."""
        with self.assertRaises(ValueError):
            select_cuts(CutPool(), np.zeros(1), max_cuts=-1)
