import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from django.db import models

from core.exceptions import InstanceValidationError

LE, EQ, GE = 'L', 'E', 'G'
SENSES = (LE, EQ, GE)


class ClassTag(models.TextChoices):
    PACKING = 'packing', 'Packing'
    BIN_PACKING = 'bin_packing', 'Binary packing'
    MAX_CUT = 'max_cut', 'Maximum cut'
    COMB_AUCTION = 'comb_auction', 'Combinatorial auction'
    INDEP_SET = 'indep_set', 'Independent set'
    CUSTOM = 'custom', 'Custom'


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MilpInstance:
    """
    A mixed-integer linear program in minimization form.

        min c^T x  s.t.  a_i x (<=|=|>=) b_i,  lb <= x <= ub,  x_j integer for j in I

    Rows are held as a CSR matrix plus one sense per row. Arrays are made
    read-only on construction so an instance can be shared between workers.
    """
    name: str
    objective: np.ndarray
    matrix: sp.csr_matrix
    senses: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    class_tag: str = ClassTag.CUSTOM
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'objective', _frozen(self.objective, float))
        object.__setattr__(self, 'rhs', _frozen(self.rhs, float))
        object.__setattr__(self, 'lower', _frozen(self.lower, float))
        object.__setattr__(self, 'upper', _frozen(self.upper, float))
        object.__setattr__(self, 'integer', _frozen(self.integer, bool))
        object.__setattr__(self, 'senses', tuple(self.senses))
        matrix = sp.csr_matrix(self.matrix, dtype=float, copy=True)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()
        object.__setattr__(self, 'matrix', matrix)
        self.validate()

    # ── invariants ───────────────────────────────────────────────────────────

    def validate(self):
        n, m = self.num_vars, self.num_cons
        if self.matrix.shape != (m, n):
            raise InstanceValidationError(
                f'Constraint matrix has shape {self.matrix.shape}, expected {(m, n)}.',
                errors={'matrix': ['shape mismatch']},
            )
        for label, vector, size in (('lower', self.lower, n), ('upper', self.upper, n),
                                    ('integer', self.integer, n), ('rhs', self.rhs, m)):
            if len(vector) != size:
                raise InstanceValidationError(
                    f'{label} has length {len(vector)}, expected {size}.',
                    errors={label: ['length mismatch']},
                )
        if len(self.senses) != m or any(s not in SENSES for s in self.senses):
            raise InstanceValidationError(
                'Every row needs a sense in L/E/G.', errors={'senses': ['invalid']},
            )
        if not np.all(np.isfinite(self.matrix.data)):
            raise InstanceValidationError(
                'Constraint coefficients must be finite.', errors={'entries': ['non-finite']},
            )
        if not np.all(np.isfinite(self.objective)) or not np.all(np.isfinite(self.rhs)):
            raise InstanceValidationError(
                'Objective and right-hand side must be finite.',
                errors={'objective': ['non-finite']},
            )
        bad = np.flatnonzero(self.lower > self.upper)
        if bad.size:
            raise InstanceValidationError(
                f'Variable {int(bad[0])} has lower bound {self.lower[bad[0]]} '
                f'above upper bound {self.upper[bad[0]]}.',
                errors={'lower': [f'lb > ub at column {int(bad[0])}']},
            )

    # ── shape helpers ────────────────────────────────────────────────────────

    @property
    def num_vars(self):
        return len(self.objective)

    @property
    def num_cons(self):
        return len(self.rhs)

    @property
    def integer_indices(self):
        return np.flatnonzero(self.integer)

    @property
    def is_bounded_box(self):
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def is_binary(self, j):
        return bool(self.integer[j] and self.lower[j] == 0.0 and self.upper[j] == 1.0)

    def dense_matrix(self):
        return self.matrix.toarray()

    def row(self, i):
        start, end = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return self.matrix.indices[start:end], self.matrix.data[start:end]

    # ── evaluation ───────────────────────────────────────────────────────────

    def objective_value(self, x):
        return float(self.objective @ np.asarray(x, dtype=float))

    def is_feasible(self, x, tol=1e-6):
        """True if x satisfies rows, bounds and integrality within `tol`."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        xi = x[self.integer]
        if np.any(np.abs(xi - np.round(xi)) > tol):
            return False
        activity = self.matrix @ x
        for value, sense, b in zip(activity, self.senses, self.rhs):
            if sense == LE and value > b + tol:
                return False
            if sense == GE and value < b - tol:
                return False
            if sense == EQ and abs(value - b) > tol:
                return False
        return True

    # ── equality (used by file round-trips) ──────────────────────────────────

    def __eq__(self, other):
        if not isinstance(other, MilpInstance):
            return NotImplemented
        return (
            self.name == other.name
            and self.class_tag == other.class_tag
            and self.senses == other.senses
            and self.metadata == other.metadata
            and np.array_equal(self.objective, other.objective)
            and np.array_equal(self.rhs, other.rhs)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
            and np.array_equal(self.integer, other.integer)
            and self.matrix.shape == other.matrix.shape
            and (self.matrix != other.matrix).nnz == 0
        )

    __hash__ = object.__hash__

    def __str__(self):
        return (
            f'{self.name} [{self.class_tag}] n={self.num_vars} m={self.num_cons} '
            f'|I|={int(self.integer.sum())}'
        )


@dataclass(frozen=True)
class Assignment:
    """A point for an instance together with its objective and oracle status."""
    values: np.ndarray
    objective: float
    status: str = 'optimal'
    integral: bool = True

    @property
    def is_feasible(self):
        return self.status == 'optimal'


def build_instance(name, objective, rows, senses, rhs, lower, upper, integer,
                   class_tag=ClassTag.CUSTOM, metadata=None):
    """
    Assemble an instance from `rows`, a list of {column: coefficient} dicts.

    Infinite bounds are allowed (`math.inf`); generators always pass finite ones.
    """
    n = len(objective)
    data, indices, indptr = [], [], [0]
    for row in rows:
        for col in sorted(row):
            if row[col] != 0:
                indices.append(col)
                data.append(float(row[col]))
        indptr.append(len(indices))
    matrix = sp.csr_matrix((data, indices, indptr), shape=(len(rows), n))
    lower = [(-math.inf if v is None else v) for v in lower]
    upper = [(math.inf if v is None else v) for v in upper]
    return MilpInstance(
        name=name, objective=objective, matrix=matrix, senses=senses, rhs=rhs,
        lower=lower, upper=upper, integer=integer, class_tag=class_tag,
        metadata=dict(metadata or {}),
    )
