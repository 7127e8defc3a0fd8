"""
Bounded-variable dual simplex.

The LP  min c x, A x (sense) b, l <= x <= u  is solved in the augmented
form [A | I][x; s] = b where the slack bounds encode the row senses. Every
column carries a finite box during the solve (infinite structural bounds are
replaced by +-BIG), so any basis can be made dual feasible by putting each
nonbasic column at the bound its reduced cost prefers. The solver starts
from the slack basis or from a warm basis and runs dual simplex pivots with
an explicit basis inverse, updated by eta transformations and refactorized
every REFACTOR_EVERY pivots.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from core.exceptions import LpNumericalError, NotBasicError

logger = logging.getLogger(__name__)

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
BIG = 1e7
REFACTOR_EVERY = 100
BLAND_AFTER = 100
MAX_PIVOTS = 50_000


class LpStatus(str, enum.Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'
    ITERATION_LIMIT = 'iteration_limit'


class BasisStatus(str, enum.Enum):
    LOWER = 'lower'
    BASIC = 'basic'
    UPPER = 'upper'
    ZERO = 'zero'


@dataclass(frozen=True)
class WarmBasis:
    """
    Basic column indices (one per row, over the n + m augmented columns)
    and, for nonbasic columns, whether they sit at their upper bound.
    """
    basic: tuple
    at_upper: frozenset = frozenset()

    def extended(self, num_vars, num_rows, num_new_rows):
        """Basis for the same problem after appending rows: new slacks enter as basic."""
        new_slacks = tuple(num_vars + num_rows + k for k in range(num_new_rows))
        return WarmBasis(self.basic + new_slacks, self.at_upper)


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_costs: np.ndarray
    var_status: list
    row_status: list
    pivot_count: int
    slacks: np.ndarray = None
    basis: WarmBasis = None
    binv: np.ndarray = field(default=None, repr=False)

    @property
    def is_optimal(self):
        return self.status == LpStatus.OPTIMAL

    def basic_row(self, column):
        """Row position of augmented column `column` in the basis."""
        try:
            return self.basis.basic.index(column)
        except (ValueError, AttributeError):
            raise NotBasicError(f'Column {column} is not basic in this solution.') from None


@dataclass(frozen=True)
class TableauRow:
    """
    Row r of B^-1 [A | I]: coefficients over the n structural then m slack
    columns, with rhs (B^-1 b)_r. Any x satisfying A x + s = b satisfies
    coefficients . [x; s] = rhs.
    """
    column: int
    coefficients: np.ndarray
    rhs: float
    value: float


class DualSimplexSolver:

    def __init__(self, problem, max_pivots=MAX_PIVOTS):
        self.problem = problem
        self.max_pivots = max_pivots
        n, m = problem.num_vars, problem.num_rows
        self.n, self.m = n, m
        self.W = np.hstack([problem.matrix, np.eye(m)])
        self.b = problem.rhs.copy()
        self.c = np.concatenate([problem.objective, np.zeros(m)])
        slack_lower, slack_upper = problem.slack_bounds()
        self.true_lower = np.concatenate([problem.lower, slack_lower])
        self.true_upper = np.concatenate([problem.upper, slack_upper])
        # Boxed bounds used during the solve. Infinite slack bounds are never
        # attained by a nonbasic slack, so they are boxed too.
        self.lower = np.maximum(self.true_lower, -BIG)
        self.upper = np.minimum(self.true_upper, BIG)
        self.pivots = 0
        self.since_refactor = 0
        self.degenerate_run = 0
        self.bland = False

    # ── basis handling ───────────────────────────────────────────────────────

    def _install(self, basic, at_upper):
        self.basic = list(basic)
        self.is_basic = np.zeros(self.n + self.m, dtype=bool)
        self.is_basic[self.basic] = True
        self.at_upper = np.zeros(self.n + self.m, dtype=bool)
        for j in at_upper:
            if not self.is_basic[j]:
                self.at_upper[j] = True
        self._refactorize()

    def _refactorize(self):
        self.since_refactor = 0
        if not self.m:
            self.binv = np.zeros((0, 0))
            return
        B = self.W[:, self.basic]
        try:
            lu, piv = scipy.linalg.lu_factor(B, check_finite=True)
        except (ValueError, scipy.linalg.LinAlgError) as exc:
            raise LpNumericalError(f'Basis factorization failed: {exc}') from exc
        if np.min(np.abs(np.diag(lu))) < 1e-11:
            raise LpNumericalError('Singular basis matrix.')
        self.binv = scipy.linalg.lu_solve((lu, piv), np.eye(self.m))

    def _eta_update(self, r, column):
        pivot = column[r]
        row_r = self.binv[r] / pivot
        self.binv -= np.outer(column, row_r)
        self.binv[r] = row_r

    def _nonbasic_values(self):
        values = np.where(self.at_upper, self.upper, self.lower)
        values[self.is_basic] = 0.0
        return values

    def _compute(self):
        """Recompute primal values x (augmented) and reduced costs d from the basis inverse."""
        x = self._nonbasic_values()
        x[self.basic] = self.binv @ (self.b - self.W @ x)
        y = self.c[self.basic] @ self.binv
        d = self.c - y @ self.W
        d[self.basic] = 0.0
        return x, y, d

    def _make_dual_feasible(self, d):
        """Move nonbasic columns to the bound favoured by their reduced cost."""
        fixed = self.lower == self.upper
        wrong_lower = ~self.is_basic & ~self.at_upper & (d < -OPT_TOL) & ~fixed
        wrong_upper = ~self.is_basic & self.at_upper & (d > OPT_TOL) & ~fixed
        self.at_upper[wrong_lower] = True
        self.at_upper[wrong_upper] = False
        return bool(wrong_lower.any() or wrong_upper.any())

    # ── pricing and ratio test ───────────────────────────────────────────────

    def _pricing(self, x):
        """Row of the leaving variable: the basic column with maximum bound violation."""
        xb = x[self.basic]
        lb = self.lower[self.basic]
        ub = self.upper[self.basic]
        infeasibility = np.maximum(lb - xb, 0.0) + np.maximum(xb - ub, 0.0)
        candidates = np.flatnonzero(infeasibility > FEAS_TOL)
        if not len(candidates):
            return None
        if self.bland:
            return int(min(candidates, key=lambda r: self.basic[r]))
        return int(candidates[np.argmax(infeasibility[candidates])])

    def _ratio_test(self, alpha, d, to_upper):
        """Entering column for a leaving variable moving to its upper (or lower) bound."""
        sigma = 1.0 if to_upper else -1.0
        signed = sigma * alpha
        movable = ~self.is_basic & (self.lower < self.upper)
        eligible = movable & (
            (~self.at_upper & (signed > PIVOT_TOL)) | (self.at_upper & (signed < -PIVOT_TOL))
        )
        candidates = np.flatnonzero(eligible)
        if not len(candidates):
            return None, 0.0
        # dual slack of each candidate; tiny wrong-signed values count as zero
        dual = np.where(self.at_upper[candidates], -d[candidates], d[candidates])
        ratios = np.maximum(dual, 0.0) / np.abs(alpha[candidates])
        best = ratios.min()
        ties = candidates[ratios <= best + 1e-12]
        if self.bland:
            q = int(ties.min())
        else:
            q = int(ties[np.argmax(np.abs(alpha[ties]))])
        return q, float(best)

    # ── main loop ────────────────────────────────────────────────────────────

    def run(self, warm_basis=None):
        if warm_basis is not None:
            try:
                self._install(warm_basis.basic, warm_basis.at_upper)
            except LpNumericalError:
                logger.debug('Warm basis rejected; falling back to the slack basis.')
                warm_basis = None
        if warm_basis is None:
            at_upper = [j for j in range(self.n) if self.c[j] < 0]
            self._install(range(self.n, self.n + self.m), at_upper)

        x, y, d = self._compute()
        self._make_dual_feasible(d)
        x, y, d = self._compute()

        while True:
            r = self._pricing(x)
            if r is not None and self.pivots >= self.max_pivots:
                logger.warning('Dual simplex hit the pivot limit (%d).', self.max_pivots)
                return self._solution(LpStatus.ITERATION_LIMIT, x, y, d)
            if r is None:
                if self.since_refactor:
                    self._refactorize()
                    x, y, d = self._compute()
                    if self._pricing(x) is not None:
                        continue
                if self._make_dual_feasible(d):
                    x, y, d = self._compute()
                    continue
                return self._finish(x, y, d)

            p = self.basic[r]
            to_upper = x[p] > self.upper[p]
            alpha = self.binv[r] @ self.W
            q, theta = self._ratio_test(alpha, d, to_upper)
            if q is None:
                return self._solution(LpStatus.INFEASIBLE, x, y, d)

            column = self.binv @ self.W[:, q]
            if abs(column[r]) < PIVOT_TOL:
                if not self.since_refactor:
                    raise LpNumericalError(f'Pivot element {column[r]:.3e} below tolerance.')
                self._refactorize()
                x, y, d = self._compute()
                continue

            self.degenerate_run = self.degenerate_run + 1 if theta < 1e-12 else 0
            if not self.bland and self.degenerate_run >= BLAND_AFTER:
                logger.debug('Switching to Bland pivoting after %d degenerate pivots.', BLAND_AFTER)
                self.bland = True

            self.basic[r] = q
            self.is_basic[q] = True
            self.is_basic[p] = False
            self.at_upper[q] = False
            self.at_upper[p] = bool(to_upper)
            self.pivots += 1
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self._refactorize()
            else:
                self._eta_update(r, column)
            x, y, d = self._compute()

    def _finish(self, x, y, d):
        at_box = (
            (np.isinf(self.true_lower) & (x <= -BIG + FEAS_TOL))
            | (np.isinf(self.true_upper) & (x >= BIG - FEAS_TOL))
        )
        if at_box.any():
            return self._solution(LpStatus.UNBOUNDED, x, y, d)
        return self._solution(LpStatus.OPTIMAL, x, y, d)

    def _status_of(self, j):
        if self.is_basic[j]:
            return BasisStatus.BASIC
        if math.isinf(self.true_lower[j]) and math.isinf(self.true_upper[j]):
            return BasisStatus.ZERO
        return BasisStatus.UPPER if self.at_upper[j] else BasisStatus.LOWER

    def _solution(self, status, x, y, d):
        statuses = [self._status_of(j) for j in range(self.n + self.m)]
        return LpSolution(
            status=status,
            x=x[:self.n].copy(),
            objective=float(self.c[:self.n] @ x[:self.n]) if status == LpStatus.OPTIMAL else math.nan,
            duals=y.copy(),
            reduced_costs=d[:self.n].copy(),
            var_status=statuses[:self.n],
            row_status=statuses[self.n:],
            pivot_count=self.pivots,
            slacks=x[self.n:].copy(),
            basis=WarmBasis(tuple(self.basic), frozenset(np.flatnonzero(self.at_upper).tolist())),
            binv=self.binv.copy(),
        )


def solve_lp(problem, warm_basis=None, max_pivots=MAX_PIVOTS):
    """
    Solve `problem` from the slack basis, or from `warm_basis` when given.

    A warm basis that cannot be factorized falls back to a cold start.
    """
    if warm_basis is not None and len(warm_basis.basic) != problem.num_rows:
        raise ValueError(
            f'Warm basis has {len(warm_basis.basic)} basic columns for {problem.num_rows} rows.'
        )
    solution = DualSimplexSolver(problem, max_pivots).run(warm_basis)
    logger.debug('LP %s after %d pivots (obj=%s)', solution.status.value,
                 solution.pivot_count, solution.objective)
    return solution


def resolve_with_rows(problem, new_rows, warm_basis, max_pivots=MAX_PIVOTS):
    """
    Append `new_rows` to `problem` (in place) and re-optimize by dual simplex
    from `warm_basis`, the optimal basis of the problem before the append.
    """
    new_rows = list(new_rows)
    old_rows = problem.num_rows
    problem.add_rows(new_rows)
    basis = warm_basis.extended(problem.num_vars, old_rows, len(new_rows))
    return solve_lp(problem, warm_basis=basis, max_pivots=max_pivots)


def tableau_row(problem, solution, basic_var_index):
    """Tableau row of augmented column `basic_var_index` (structural j or slack n + i)."""
    r = solution.basic_row(basic_var_index)
    W = np.hstack([problem.matrix, np.eye(problem.num_rows)])
    coefficients = solution.binv[r] @ W
    rhs = float(solution.binv[r] @ problem.rhs)
    n = problem.num_vars
    value = (solution.x[basic_var_index] if basic_var_index < n
             else solution.slacks[basic_var_index - n])
    return TableauRow(basic_var_index, coefficients, rhs, float(value))
