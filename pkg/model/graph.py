"""
Triplet-graph encoding of the solver state at a configuration update:
variable nodes, constraint nodes (base rows and applied cuts) and one node
per separator, with the constraint matrix on the V-C edges and complete
S-V and S-C connections.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from lp.simplex import BasisStatus
from instances.problem import EQ, GE, LE
from separators.config import NUM_SEPARATORS, SEPARATOR_NAMES

SEP_FEATURE_MODES = ('rich', 'binary')

VARIABLE_FEATURES = (
    'objective',             # c_j / ||c||
    'type_binary',
    'type_integer',
    'type_continuous',
    'has_lb',
    'has_ub',
    'reduced_cost',          # d_j / ||c||
    'solution_value',
    'solution_frac',
    'sol_is_at_lb',
    'sol_is_at_ub',
    'basis_basic',
    'basis_lower',
    'basis_upper',
    'basis_zero',
    'column_density',
    'is_fixed',
)

CONSTRAINT_FEATURES = (
    'obj_cosine',
    'bias',                  # b_i / ||a_i||
    'is_tight',
    'dual_value',            # y_i / (||a_i|| ||c||)
    'sense_le',
    'sense_ge',
    'sense_eq',
    'is_cut',
    'efficacy',              # (a_i x - b_i) / ||a_i||, signed as a <= row
    'slack',                 # |b_i - a_i x| / ||a_i||
    'cut_score',             # cut selection score; 0 on base rows
    'density',
    'frac_integer',
    'frac_binary',
    'frac_continuous',
    'integral_coefs',
    'age',
    'mean_coef_ratio',
    'min_coef_ratio',
    'frac_positive',
    'slack_basic',
    'integral_rhs',
    'is_applied',
    'obj_parallelism',
    'log_support',
) + tuple(f'origin_{name}' for name in SEPARATOR_NAMES)

TIGHT_TOL = 1e-6


@dataclass
class TripletGraph:
    variables: np.ndarray
    constraints: np.ndarray
    separators: np.ndarray
    edges: sp.csr_matrix

    def __post_init__(self):
        for name in ('variables', 'constraints', 'separators'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f'Non-finite {name} features.')

    @property
    def num_nodes(self):
        return len(self.variables) + len(self.constraints) + len(self.separators)

    @property
    def dims(self):
        return self.variables.shape[1], self.constraints.shape[1], self.separators.shape[1]

    def cv_adjacency(self):
        """Weighted-mean aggregation from variables into constraints."""
        return _row_normalized(self.edges)

    def vc_adjacency(self):
        return _row_normalized(self.edges.T.tocsr())

    def with_separators(self, separators):
        return TripletGraph(self.variables, self.constraints, separators, self.edges)

    def permuted(self, variable_order=None, constraint_order=None):
        v = np.arange(len(self.variables)) if variable_order is None else np.asarray(variable_order)
        c = np.arange(len(self.constraints)) if constraint_order is None else np.asarray(constraint_order)
        return TripletGraph(self.variables[v], self.constraints[c], self.separators,
                            self.edges[c][:, v].tocsr())

    def fingerprint(self):
        digest = hashlib.sha256()
        for array in (self.variables, self.constraints, self.separators):
            digest.update(np.ascontiguousarray(array, dtype=float).tobytes())
        digest.update(np.ascontiguousarray(self.edges.toarray(), dtype=float).tobytes())
        return digest.hexdigest()[:16]


def _row_normalized(matrix):
    weights = abs(matrix)
    totals = np.asarray(weights.sum(axis=1)).ravel()
    scale = np.divide(1.0, totals, out=np.zeros_like(totals), where=totals > 0)
    return sp.diags(scale) @ weights.tocsr()


def separator_features(config, mode='rich'):
    """[activation bit | one-hot identity] per separator, or the bit alone."""
    if mode not in SEP_FEATURE_MODES:
        raise ValueError(f'Unknown separator feature mode {mode!r}.')
    bits = config.vector()[:, None]
    if mode == 'binary':
        return bits
    return np.hstack([bits, np.eye(config.width)])


def _variable_block(instance, problem, solution, obj_norm):
    n = problem.num_vars
    x = solution.x
    lower, upper = problem.lower, problem.upper
    integer = np.asarray(instance.integer, dtype=bool)
    binary = np.array([instance.is_binary(j) for j in range(n)], dtype=bool)
    has_lb = np.isfinite(lower)
    has_ub = np.isfinite(upper)
    frac = np.where(integer, np.abs(x - np.round(x)), 0.0)
    status = [BasisStatus(s) for s in solution.var_status]
    density = (np.abs(problem.matrix[:problem.num_base_rows]) > 0).sum(axis=0) / max(problem.num_base_rows, 1)
    return np.column_stack([
        problem.objective / obj_norm,
        binary,
        integer & ~binary,
        ~integer,
        has_lb,
        has_ub,
        solution.reduced_costs[:n] / obj_norm,
        x,
        frac,
        has_lb & (np.abs(x - np.where(has_lb, lower, 0)) <= TIGHT_TOL),
        has_ub & (np.abs(x - np.where(has_ub, upper, 0)) <= TIGHT_TOL),
        [s == BasisStatus.BASIC for s in status],
        [s == BasisStatus.LOWER for s in status],
        [s == BasisStatus.UPPER for s in status],
        [s == BasisStatus.ZERO for s in status],
        density,
        lower == upper,
    ]).astype(float)


def _constraint_block(instance, problem, solution, cuts, obj_norm):
    m, n = problem.matrix.shape
    integer = np.asarray(instance.integer, dtype=bool)
    binary = np.array([instance.is_binary(j) for j in range(n)], dtype=bool)
    activity = problem.matrix @ solution.x
    features = np.zeros((m, len(CONSTRAINT_FEATURES)))
    origin_column = len(CONSTRAINT_FEATURES) - NUM_SEPARATORS
    for i in range(m):
        row = problem.matrix[i]
        support = np.flatnonzero(row)
        norm = float(np.linalg.norm(row)) or 1.0
        sense = problem.senses[i]
        # signed as a <= row: positive means violated
        sign = -1.0 if sense == GE else 1.0
        violation = sign * (activity[i] - problem.rhs[i]) / norm
        magnitudes = np.abs(row[support])
        k = i - problem.num_base_rows
        cut = cuts[k] if 0 <= k < len(cuts) else None
        size = max(len(support), 1)
        features[i, :25] = [
            float(row @ problem.objective) / (norm * obj_norm),
            problem.rhs[i] / norm,
            abs(activity[i] - problem.rhs[i]) <= TIGHT_TOL * max(1.0, abs(problem.rhs[i])),
            solution.duals[i] / (norm * obj_norm),
            sense == LE,
            sense == GE,
            sense == EQ,
            i >= problem.num_base_rows,
            violation,
            abs(violation),
            cut.score if cut is not None else 0.0,
            len(support) / n,
            integer[support].sum() / size,
            binary[support].sum() / size,
            (~integer[support]).sum() / size,
            bool(np.all(np.abs(row[support] - np.round(row[support])) <= 1e-9)),
            cut.age if cut is not None else 0,
            magnitudes.mean() / magnitudes.max() if len(support) else 0.0,
            magnitudes.min() / magnitudes.max() if len(support) else 0.0,
            (row[support] > 0).sum() / size,
            BasisStatus(solution.row_status[i]) == BasisStatus.BASIC,
            abs(problem.rhs[i] - round(problem.rhs[i])) <= 1e-9,
            cut.applied if cut is not None else 0,
            cut.obj_parallelism if cut is not None else 0.0,
            math.log1p(len(support)),
        ]
        if cut is not None and cut.origin in SEPARATOR_NAMES:
            features[i, origin_column + SEPARATOR_NAMES.index(cut.origin)] = 1.0
    return features


def encode(instance, snapshot, config, sep_feat='rich'):
    """Triplet graph of `snapshot` (an LP state at an update round) under `config`."""
    solution = snapshot.solution
    if solution is None or not solution.is_optimal:
        raise ValueError(f'{instance.name}: the snapshot LP is not solved to optimality.')
    problem = snapshot.problem
    obj_norm = float(np.linalg.norm(problem.objective)) or 1.0
    return TripletGraph(
        variables=_variable_block(instance, problem, solution, obj_norm),
        constraints=_constraint_block(instance, problem, solution, snapshot.cuts, obj_norm),
        separators=separator_features(config, sep_feat),
        edges=sp.csr_matrix(problem.matrix),
    )
