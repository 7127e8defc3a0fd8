import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import InstanceTooLargeError
from instances.generators import generate_bin_packing
from instances.oracle import brute_force_opt, max_activity
from instances.problem import GE, LE, build_instance
from .test_problem import knapsack_instance


class BruteForceOptTest(SimpleTestCase):
    """Test the enumeration oracle."""

    def test_knapsack(self):
        """Test max 3x + 2y, 2x + y <= 2 gives -3 at (1, 0)."""
        result = brute_force_opt(knapsack_instance())
        self.assertEqual(result.status, 'optimal')
        self.assertAlmostEqual(result.objective, -3.0)
        np.testing.assert_array_equal(result.values, [1.0, 0.0])

    def test_zero_objective(self):
        """Test an all-zero objective has optimum 0."""
        instance = build_instance('zero', [0.0, 0.0], [{0: 1, 1: 1}], [LE], [1.0],
                                  [0, 0], [1, 1], [True, True])
        self.assertEqual(brute_force_opt(instance).objective, 0.0)

    def test_infeasible(self):
        """Test x >= 1 and x <= 0 is infeasible."""
        instance = build_instance('infeasible', [1.0], [{0: 1}, {0: 1}], [GE, LE], [1.0, 0.0],
                                  [0], [1], [True])
        result = brute_force_opt(instance)
        self.assertEqual(result.status, 'infeasible')
        self.assertFalse(result.is_feasible)
        self.assertEqual(result.objective, math.inf)

    def test_refuses_large_instances(self):
        """Test more integer variables than var_limit is refused."""
        with self.assertRaises(InstanceTooLargeError):
            brute_force_opt(generate_bin_packing(20, 5, seed=1), var_limit=16)

    def test_point_limit(self):
        """Test the leaf budget is enforced."""
        instance = build_instance('wide', [-1.0] * 6, [{j: 1 for j in range(6)}], [LE], [9.0],
                                  [0] * 6, [3] * 6, [True] * 6)
        with self.assertRaises(InstanceTooLargeError):
            brute_force_opt(instance, point_limit=1)

    def test_mixed_integer_residual_lp(self):
        """Test continuous variables are completed by the residual LP."""
        # min -x - y,  x + y <= 1.5,  x binary, y in [0, 1] continuous
        instance = build_instance('mixed', [-1.0, -1.0], [{0: 1, 1: 1}], [LE], [1.5],
                                  [0, 0], [1, 1], [True, False])
        result = brute_force_opt(instance)
        self.assertAlmostEqual(result.objective, -1.5)
        self.assertFalse(result.integral)

    def test_max_activity(self):
        """Test maximizing a direction over the feasible set."""
        self.assertAlmostEqual(max_activity(knapsack_instance(), [1.0, 1.0]), 1.0)
