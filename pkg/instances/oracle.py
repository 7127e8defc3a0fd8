"""
Brute-force optimum oracle for small instances.

Integer variables are enumerated depth-first inside their bound box with
row-activity pruning; when continuous variables are present each integer
leaf is completed by a residual LP solved with scipy's HiGHS backend, which
keeps the oracle independent of the in-house simplex.
"""

import logging
import math

import numpy as np
from scipy.optimize import linprog

from core.exceptions import InstanceTooLargeError
from .problem import EQ, GE, LE, Assignment

logger = logging.getLogger(__name__)

FEAS_TOL = 1e-7


def _infeasible(n):
    return Assignment(values=np.full(n, np.nan), objective=math.inf,
                      status='infeasible', integral=False)


def _contribution_bounds(coefficients, lower, upper):
    """Row-wise min/max of coefficients * x over lower <= x <= upper."""
    with np.errstate(invalid='ignore'):
        lo = coefficients * lower
        hi = coefficients * upper
    lo = np.where(coefficients == 0, 0.0, lo)
    hi = np.where(coefficients == 0, 0.0, hi)
    return np.minimum(lo, hi), np.maximum(lo, hi)


class _Enumerator:

    def __init__(self, instance, objective, point_limit):
        self.instance = instance
        self.objective = np.asarray(objective, dtype=float)
        self.point_limit = point_limit
        self.A = instance.dense_matrix()
        self.b = instance.rhs
        self.senses = np.array(instance.senses)
        self.int_idx = instance.integer_indices
        self.cont_idx = np.flatnonzero(~instance.integer)
        self.leaves = 0
        self.best = None
        self.best_value = math.inf

        lo, hi = _contribution_bounds(self.A, instance.lower, instance.upper)
        k = len(self.int_idx)
        # suffix_lo[d] = min activity of integer vars at positions >= d plus all continuous vars
        cont_lo = lo[:, self.cont_idx].sum(axis=1)
        cont_hi = hi[:, self.cont_idx].sum(axis=1)
        self.suffix_lo = np.zeros((k + 1, len(self.b)))
        self.suffix_hi = np.zeros((k + 1, len(self.b)))
        self.suffix_lo[k], self.suffix_hi[k] = cont_lo, cont_hi
        for d in range(k - 1, -1, -1):
            j = self.int_idx[d]
            self.suffix_lo[d] = self.suffix_lo[d + 1] + lo[:, j]
            self.suffix_hi[d] = self.suffix_hi[d + 1] + hi[:, j]

        c_lo, _ = _contribution_bounds(self.objective, instance.lower, instance.upper)
        self.obj_suffix = np.zeros(k + 1)
        self.obj_suffix[k] = c_lo[self.cont_idx].sum()
        for d in range(k - 1, -1, -1):
            self.obj_suffix[d] = self.obj_suffix[d + 1] + c_lo[self.int_idx[d]]

        le = self.senses == LE
        ge = self.senses == GE
        eq = self.senses == EQ
        self.check_upper = le | eq
        self.check_lower = ge | eq

    def run(self):
        x = np.zeros(self.instance.num_vars)
        self._descend(0, x, np.zeros(len(self.b)), 0.0)
        return self.best, self.best_value

    def _prunable(self, depth, activity, obj_partial):
        lo = activity + self.suffix_lo[depth]
        hi = activity + self.suffix_hi[depth]
        if np.any(self.check_upper & (lo > self.b + FEAS_TOL)):
            return True
        if np.any(self.check_lower & (hi < self.b - FEAS_TOL)):
            return True
        return obj_partial + self.obj_suffix[depth] >= self.best_value - 1e-9

    def _descend(self, depth, x, activity, obj_partial):
        if self._prunable(depth, activity, obj_partial):
            return
        if depth == len(self.int_idx):
            self._leaf(x, activity, obj_partial)
            return
        j = self.int_idx[depth]
        lower = math.ceil(self.instance.lower[j] - FEAS_TOL)
        upper = math.floor(self.instance.upper[j] + FEAS_TOL)
        column = self.A[:, j]
        values = range(lower, upper + 1)
        # promising values first so the objective bound prunes early
        if self.objective[j] < 0:
            values = reversed(values)
        for value in values:
            x[j] = value
            self._descend(depth + 1, x, activity + column * value,
                          obj_partial + self.objective[j] * value)
        x[j] = 0.0

    def _leaf(self, x, activity, obj_partial):
        self.leaves += 1
        if self.leaves > self.point_limit:
            raise InstanceTooLargeError(
                f'{self.instance.name}: enumeration exceeded {self.point_limit} points.'
            )
        if not len(self.cont_idx):
            value = obj_partial
            point = x.copy()
        else:
            point, value = self._residual_lp(x, activity, obj_partial)
            if point is None:
                return
        if value < self.best_value - 1e-9:
            self.best, self.best_value = point, value

    def _residual_lp(self, x, activity, obj_partial):
        cols = self.cont_idx
        residual = self.b - activity
        sub = self.A[:, cols]
        ub_rows = [sub[self.senses == LE], -sub[self.senses == GE]]
        ub_rhs = [residual[self.senses == LE], -residual[self.senses == GE]]
        A_ub = np.vstack(ub_rows)
        b_ub = np.concatenate(ub_rhs)
        A_eq = sub[self.senses == EQ]
        b_eq = residual[self.senses == EQ]
        bounds = [
            (None if math.isinf(self.instance.lower[j]) else self.instance.lower[j],
             None if math.isinf(self.instance.upper[j]) else self.instance.upper[j])
            for j in cols
        ]
        result = linprog(
            self.objective[cols],
            A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
            A_eq=A_eq if len(b_eq) else None, b_eq=b_eq if len(b_eq) else None,
            bounds=bounds, method='highs',
        )
        if result.status == 3:
            raise InstanceTooLargeError(
                f'{self.instance.name}: residual LP is unbounded; the oracle needs a bounded continuous part.'
            )
        if result.status != 0:
            return None, math.inf
        point = x.copy()
        point[cols] = result.x
        return point, obj_partial + float(result.fun)


def brute_force_opt(instance, var_limit=16, point_limit=2_000_000, objective=None):
    """
    Globally optimal assignment of `instance` by integer enumeration.

    `objective` overrides the instance objective (used to maximize a cut's
    left-hand side over the feasible set). Raises InstanceTooLargeError when
    the instance has more than `var_limit` integer variables, an unbounded
    integer domain, or the enumeration exceeds `point_limit` leaves.
    """
    k = len(instance.integer_indices)
    if k > var_limit:
        raise InstanceTooLargeError(
            f'{instance.name}: {k} integer variables exceeds the oracle limit of {var_limit}.'
        )
    ints = instance.integer_indices
    if not (np.all(np.isfinite(instance.lower[ints])) and np.all(np.isfinite(instance.upper[ints]))):
        raise InstanceTooLargeError(f'{instance.name}: integer variables need a finite box.')

    objective = instance.objective if objective is None else objective
    enumerator = _Enumerator(instance, objective, point_limit)
    point, value = enumerator.run()
    logger.debug('%s: enumerated %d leaves', instance.name, enumerator.leaves)
    if point is None:
        return _infeasible(instance.num_vars)
    return Assignment(values=point, objective=float(value), status='optimal',
                      integral=not len(enumerator.cont_idx))


def max_activity(instance, direction, var_limit=16, point_limit=2_000_000):
    """max direction^T x over the feasible set, or -inf when it is empty."""
    result = brute_force_opt(instance, var_limit, point_limit,
                             objective=-np.asarray(direction, dtype=float))
    return -result.objective if result.status == 'optimal' else -math.inf
