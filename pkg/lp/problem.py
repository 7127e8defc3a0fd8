import math
from dataclasses import dataclass

import numpy as np

from instances.problem import EQ, GE, LE, SENSES

DROP_TOL = 1e-12


@dataclass(frozen=True)
class LpRow:
    """One sparse row  coeffs . x  (sense)  rhs  appended to an LpProblem."""
    indices: np.ndarray
    values: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f'Unknown row sense {self.sense!r}.')
        indices = np.asarray(self.indices, dtype=int)
        values = np.asarray(self.values, dtype=float)
        keep = np.abs(values) >= DROP_TOL
        object.__setattr__(self, 'indices', indices[keep])
        object.__setattr__(self, 'values', values[keep])
        object.__setattr__(self, 'rhs', float(self.rhs))

    @classmethod
    def from_dense(cls, coefficients, sense, rhs):
        coefficients = np.asarray(coefficients, dtype=float)
        indices = np.flatnonzero(coefficients)
        return cls(indices, coefficients[indices], sense, rhs)

    def dense(self, n):
        row = np.zeros(n)
        row[self.indices] = self.values
        return row


class LpProblem:
    """
    LP relaxation  min c x  s.t.  A x (<=|=|>=) b,  lower <= x <= upper.

    The constraint block is dense. Rows are only ever appended (cuts), so row
    i keeps its index for the lifetime of the problem; `num_base_rows` counts
    the rows that came from the instance.
    """

    def __init__(self, objective, matrix, senses, rhs, lower, upper, num_base_rows=None):
        self.objective = np.asarray(objective, dtype=float)
        n = len(self.objective)
        self.matrix = np.asarray(matrix, dtype=float).reshape(-1, n)
        self.senses = list(senses)
        self.rhs = np.asarray(rhs, dtype=float)
        self.lower = np.asarray(lower, dtype=float).copy()
        self.upper = np.asarray(upper, dtype=float).copy()
        self.num_base_rows = len(self.rhs) if num_base_rows is None else num_base_rows

    @classmethod
    def from_instance(cls, instance):
        return cls(
            objective=instance.objective,
            matrix=instance.dense_matrix(),
            senses=instance.senses,
            rhs=instance.rhs,
            lower=instance.lower,
            upper=instance.upper,
        )

    @property
    def num_vars(self):
        return len(self.objective)

    @property
    def num_rows(self):
        return len(self.rhs)

    @property
    def num_cuts(self):
        return self.num_rows - self.num_base_rows

    def slack_bounds(self):
        """Bounds of s in A x + s = b: <= gives [0, inf), >= gives (-inf, 0], = gives [0, 0]."""
        senses = np.array(self.senses, dtype=object)
        lower = np.where(senses == GE, -math.inf, 0.0).astype(float)
        upper = np.where(senses == LE, math.inf, 0.0).astype(float)
        return lower, upper

    def add_rows(self, rows):
        rows = list(rows)
        if not rows:
            return
        n = self.num_vars
        self.matrix = np.vstack([self.matrix] + [row.dense(n)[None, :] for row in rows])
        self.senses = self.senses + [row.sense for row in rows]
        self.rhs = np.concatenate([self.rhs, [row.rhs for row in rows]])

    def copy(self):
        return LpProblem(self.objective, self.matrix, self.senses, self.rhs,
                         self.lower, self.upper, self.num_base_rows)

    def with_bounds(self, lower, upper):
        """Copy with different variable bounds (branching); rows are shared until appended to."""
        clone = self.copy()
        clone.lower = np.asarray(lower, dtype=float).copy()
        clone.upper = np.asarray(upper, dtype=float).copy()
        return clone

    def row_activity(self, x):
        return self.matrix @ x

    def is_feasible(self, x, tol=1e-7):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        activity = self.row_activity(x)
        senses = np.array(self.senses, dtype=object)
        if np.any((senses == LE) & (activity > self.rhs + tol)):
            return False
        if np.any((senses == GE) & (activity < self.rhs - tol)):
            return False
        return not np.any((senses == EQ) & (np.abs(activity - self.rhs) > tol))
