import math

import numpy as np
from django.test import SimpleTestCase

from instances.generators import generate
from instances.problem import EQ, GE, LE
from lp.problem import LpProblem, LpRow


class LpRowTest(SimpleTestCase):
    """Test sparse LP rows."""

    def test_tiny_coefficients_are_dropped(self):
        """Test coefficients below 1e-12 are removed."""
        row = LpRow([0, 1, 2], [1.0, 1e-14, -2.0], LE, 3)
        np.testing.assert_array_equal(row.indices, [0, 2])
        np.testing.assert_array_equal(row.dense(4), [1.0, 0.0, -2.0, 0.0])

    def test_from_dense(self):
        """Test building a row from a dense vector."""
        row = LpRow.from_dense([0.0, 2.0, 0.0], GE, 1.0)
        np.testing.assert_array_equal(row.indices, [1])
        self.assertEqual(row.rhs, 1.0)

    def test_unknown_sense(self):
        """Test an invalid sense is rejected."""
        with self.assertRaises(ValueError):
            LpRow([0], [1.0], '<', 0.0)


class LpProblemTest(SimpleTestCase):
    """Test the LP relaxation container."""

    def setUp(self):
        self.instance = generate('packing', seed=4)
        self.problem = LpProblem.from_instance(self.instance)

    def test_from_instance(self):
        """Test the relaxation copies rows and bounds."""
        self.assertEqual(self.problem.num_vars, self.instance.num_vars)
        self.assertEqual(self.problem.num_rows, self.instance.num_cons)
        self.assertEqual(self.problem.num_cuts, 0)
        np.testing.assert_array_equal(self.problem.matrix, self.instance.dense_matrix())

    def test_add_rows_keeps_base_count(self):
        """Test appended cuts count separately from base rows."""
        self.problem.add_rows([LpRow([0], [1.0], LE, 1.0), LpRow([1], [1.0], LE, 2.0)])
        self.assertEqual(self.problem.num_rows, self.instance.num_cons + 2)
        self.assertEqual(self.problem.num_base_rows, self.instance.num_cons)
        self.assertEqual(self.problem.num_cuts, 2)

    def test_with_bounds_does_not_touch_the_original(self):
        """Test branching copies leave the parent problem intact."""
        upper = self.problem.upper.copy()
        upper[0] = 0.0
        child = self.problem.with_bounds(self.problem.lower, upper)
        child.add_rows([LpRow([0], [1.0], LE, 0.0)])
        self.assertNotEqual(self.problem.upper[0], 0.0)
        self.assertEqual(self.problem.num_rows, self.instance.num_cons)

    def test_slack_bounds(self):
        """Test slack bounds encode the row senses."""
        problem = LpProblem([1.0], [[1.0], [1.0], [1.0]], [LE, GE, EQ], [1, 0, 0.5], [0], [1])
        lower, upper = problem.slack_bounds()
        np.testing.assert_array_equal(lower, [0.0, -math.inf, 0.0])
        np.testing.assert_array_equal(upper, [math.inf, 0.0, 0.0])
