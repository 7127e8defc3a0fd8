import math

import numpy as np
from django.test import SimpleTestCase
from scipy.optimize import linprog

from core.exceptions import NotBasicError
from instances.problem import EQ, GE, LE
from lp.problem import LpProblem
from lp.simplex import BasisStatus, LpStatus, solve_lp, tableau_row


def random_lp(rng, n=8, m=8, senses=(LE, GE, EQ)):
    """Random feasible LP: rows are built around a point inside the box."""
    A = rng.uniform(-1.0, 1.0, size=(m, n))
    lower = rng.uniform(-2.0, 0.0, size=n)
    upper = lower + rng.uniform(0.5, 3.0, size=n)
    x0 = rng.uniform(lower, upper)
    row_senses = [senses[k] for k in rng.integers(0, len(senses), size=m)]
    activity = A @ x0
    rhs = np.array([
        a + (rng.uniform(0, 1) if s == LE else -rng.uniform(0, 1) if s == GE else 0.0)
        for a, s in zip(activity, row_senses)
    ])
    c = rng.uniform(-1.0, 1.0, size=n)
    return LpProblem(c, A, row_senses, rhs, lower, upper)


def linprog_objective(problem):
    senses = np.array(problem.senses)
    A_ub = np.vstack([problem.matrix[senses == LE], -problem.matrix[senses == GE]])
    b_ub = np.concatenate([problem.rhs[senses == LE], -problem.rhs[senses == GE]])
    A_eq, b_eq = problem.matrix[senses == EQ], problem.rhs[senses == EQ]
    bounds = [(None if math.isinf(lo) else lo, None if math.isinf(hi) else hi)
              for lo, hi in zip(problem.lower, problem.upper)]
    result = linprog(problem.objective,
                     A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                     A_eq=A_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
                     bounds=bounds, method='highs')
    return result


class SolveLpTest(SimpleTestCase):
    """Test the dual simplex on small and random LPs."""

    def test_single_binding_row(self):
        """Test min -x - y, x + y <= 1.5, x, y in [0, 1] gives -1.5."""
        problem = LpProblem([-1.0, -1.0], [[1.0, 1.0]], [LE], [1.5], [0, 0], [1, 1])
        solution = solve_lp(problem)
        self.assertEqual(solution.status, LpStatus.OPTIMAL)
        self.assertAlmostEqual(solution.objective, -1.5)

    def test_infeasible_box(self):
        """Test x in [2, 3] with x <= 1 is infeasible."""
        problem = LpProblem([1.0], [[1.0]], [LE], [1.0], [2.0], [3.0])
        self.assertEqual(solve_lp(problem).status, LpStatus.INFEASIBLE)

    def test_unbounded(self):
        """Test min -x with x >= 0 unbounded above reports unbounded."""
        problem = LpProblem([-1.0, 0.0], [[0.0, 1.0]], [LE], [1.0], [0, 0], [math.inf, 1])
        self.assertEqual(solve_lp(problem).status, LpStatus.UNBOUNDED)

    def test_no_rows(self):
        """Test a box-only LP puts every variable at its cheaper bound."""
        problem = LpProblem([1.0, -2.0], np.zeros((0, 2)), [], [], [0, -1], [4, 3])
        solution = solve_lp(problem)
        self.assertEqual(solution.status, LpStatus.OPTIMAL)
        np.testing.assert_allclose(solution.x, [0.0, 3.0])

    def test_iteration_limit(self):
        """Test the pivot budget is reported as iteration_limit."""
        problem = LpProblem([-1.0, -1.0], [[1.0, 1.0]], [LE], [1.5], [0, 0], [1, 1])
        self.assertEqual(solve_lp(problem, max_pivots=0).status, LpStatus.ITERATION_LIMIT)

    def test_random_lps_match_linprog(self):
        """Test random 8x8 LPs agree with HiGHS within 1e-6."""
        rng = np.random.default_rng(2024)
        for _ in range(40):
            problem = random_lp(rng)
            solution = solve_lp(problem)
            reference = linprog_objective(problem)
            self.assertEqual(reference.status, 0)
            self.assertEqual(solution.status, LpStatus.OPTIMAL)
            self.assertAlmostEqual(solution.objective, reference.fun, delta=1e-6)

    def test_optimality_certificate(self):
        """Test primal/dual feasibility and the duality identity on random LPs."""
        rng = np.random.default_rng(99)
        for _ in range(25):
            problem = random_lp(rng)
            solution = solve_lp(problem)
            x = solution.x
            self.assertTrue(problem.is_feasible(x, tol=1e-6))

            d = solution.reduced_costs
            for j, status in enumerate(solution.var_status):
                if status == BasisStatus.LOWER:
                    self.assertGreaterEqual(d[j], -1e-7)
                    self.assertAlmostEqual(x[j], problem.lower[j], delta=1e-7)
                elif status == BasisStatus.UPPER:
                    self.assertLessEqual(d[j], 1e-7)
                    self.assertAlmostEqual(x[j], problem.upper[j], delta=1e-7)
                else:
                    self.assertAlmostEqual(d[j], 0.0, delta=1e-7)

            # c x = b y + d_x x + d_s s with d_s = -y
            y = solution.duals
            identity = problem.rhs @ y + d @ x - y @ solution.slacks
            self.assertAlmostEqual(problem.objective @ x, identity, delta=1e-6)

    def test_objective_below_feasible_samples(self):
        """Test the optimum is no worse than random feasible points."""
        rng = np.random.default_rng(5)
        problem = LpProblem([-1.0, -2.0, 0.5], [[1.0, 1.0, 1.0], [1.0, -1.0, 0.0]],
                            [LE, GE], [2.0, -1.0], [0, 0, 0], [2, 2, 2])
        optimum = solve_lp(problem).objective
        for _ in range(500):
            point = rng.uniform(0, 2, size=3)
            if problem.is_feasible(point):
                self.assertLessEqual(optimum, problem.objective @ point + 1e-9)

    def test_deterministic(self):
        """Test two solves of the same problem pivot identically."""
        problem = random_lp(np.random.default_rng(3))
        first, second = solve_lp(problem), solve_lp(problem)
        self.assertEqual(first.pivot_count, second.pivot_count)
        np.testing.assert_array_equal(first.x, second.x)


class TableauRowTest(SimpleTestCase):
    """Test tableau rows of the optimal basis."""

    def test_identity_basis_row_equals_original_row(self):
        """Test the slack basis gives back the original row."""
        problem = LpProblem([1.0, 2.0], [[1.0, 3.0], [2.0, 1.0]], [LE, LE], [5.0, 4.0],
                            [0, 0], [1, 1])
        solution = solve_lp(problem)
        self.assertEqual(solution.pivot_count, 0)
        row = tableau_row(problem, solution, problem.num_vars + 1)
        np.testing.assert_allclose(row.coefficients, [2.0, 1.0, 0.0, 1.0], atol=1e-12)
        self.assertAlmostEqual(row.rhs, 4.0)

    def test_row_holds_for_any_point(self):
        """Test row . [x; b - A x] == rhs for random points."""
        rng = np.random.default_rng(17)
        problem = random_lp(rng, senses=(LE,))
        solution = solve_lp(problem)
        for column in solution.basis.basic:
            row = tableau_row(problem, solution, column)
            for _ in range(10):
                x = rng.uniform(problem.lower, problem.upper)
                s = problem.rhs - problem.matrix @ x
                self.assertAlmostEqual(row.coefficients @ np.concatenate([x, s]), row.rhs, delta=1e-9)

    def test_basic_value(self):
        """Test the reported value equals the basic variable in the solution."""
        problem = random_lp(np.random.default_rng(8), senses=(LE,))
        solution = solve_lp(problem)
        structural = [j for j in solution.basis.basic if j < problem.num_vars]
        for j in structural:
            self.assertAlmostEqual(tableau_row(problem, solution, j).value, solution.x[j])

    def test_nonbasic_index_raises(self):
        """Test asking for a nonbasic column raises NotBasicError."""
        problem = LpProblem([1.0, 2.0], [[1.0, 3.0]], [LE], [5.0], [0, 0], [1, 1])
        solution = solve_lp(problem)
        with self.assertRaises(NotBasicError):
            tableau_row(problem, solution, 0)
