import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from instances.problem import LE
from lp.problem import LpRow

logger = logging.getLogger(__name__)

MIN_EFFICACY = 1e-6
COEF_DROP_TOL = 1e-10
MAX_DYNAMISM = 1e7
OBJ_PARALLELISM_WEIGHT = 0.1
MAX_AGE = 3


@dataclass
class Cut:
    """A globally valid inequality  values . x[indices] <= rhs  produced by `origin`."""
    indices: np.ndarray
    values: np.ndarray
    rhs: float
    origin: str
    efficacy: float = 0.0
    obj_parallelism: float = 0.0
    age: int = 0
    applied: bool = False

    @property
    def norm(self):
        return float(np.linalg.norm(self.values))

    @property
    def score(self):
        return self.efficacy + OBJ_PARALLELISM_WEIGHT * self.obj_parallelism

    def dense(self, n):
        row = np.zeros(n)
        row[self.indices] = self.values
        return row

    def activity(self, x):
        return float(self.values @ np.asarray(x)[self.indices])

    def scaled(self, factor):
        return Cut(self.indices, self.values * factor, self.rhs * factor, self.origin)

    def as_row(self):
        return LpRow(self.indices, self.values, LE, self.rhs)


def cut_efficacy(cut, x_lp):
    """Euclidean distance by which x_lp violates the cut (<= 0 when satisfied)."""
    norm = cut.norm
    if norm == 0.0:
        return 0.0
    return (cut.activity(x_lp) - cut.rhs) / norm


def objective_parallelism(cut, objective):
    """
    Cosine between the cut normal and the improving direction -c of the
    min-form objective; 1 means the cut bounds the objective directly.
    """
    c = np.asarray(objective)[cut.indices]
    c_norm = np.linalg.norm(objective)
    if c_norm == 0.0 or cut.norm == 0.0:
        return 0.0
    return float(-(cut.values @ c) / (cut.norm * c_norm))


def parallelism(first, second):
    """|cos| between two cut normals."""
    common, i, j = np.intersect1d(first.indices, second.indices, return_indices=True)
    if not len(common):
        return 0.0
    return abs(float(first.values[i] @ second.values[j])) / (first.norm * second.norm)


def make_cut(dense_coefficients, rhs, origin, x_lp, lower, upper, objective=None):
    """
    Turn a dense inequality into a Cut, or None when it is numerically unsafe
    or not violated by x_lp.

    Coefficients below COEF_DROP_TOL are removed by relaxing the rhs with the
    variable's global bound; a cut whose dynamism exceeds MAX_DYNAMISM is
    discarded.
    """
    coefficients = np.asarray(dense_coefficients, dtype=float).copy()
    tiny = np.flatnonzero((coefficients != 0) & (np.abs(coefficients) < COEF_DROP_TOL))
    for j in tiny:
        a = coefficients[j]
        bound = lower[j] if a > 0 else upper[j]
        if not np.isfinite(bound):
            return None
        rhs -= a * bound
        coefficients[j] = 0.0
    if not np.isfinite(rhs):
        return None
    indices = np.flatnonzero(coefficients)
    if not len(indices):
        return None
    values = coefficients[indices]
    magnitudes = np.abs(values)
    if magnitudes.max() / magnitudes.min() > MAX_DYNAMISM:
        return None
    cut = Cut(indices, values, float(rhs), origin)
    cut.efficacy = cut_efficacy(cut, x_lp)
    if cut.efficacy <= MIN_EFFICACY:
        return None
    if objective is not None:
        cut.obj_parallelism = objective_parallelism(cut, objective)
    return cut


class CutPool:
    """
    Candidate cuts of one solve. Applied cuts stay in the pool as a record,
    so the counters always equal the number of matching cuts.
    """

    def __init__(self):
        self.cuts = []

    def __len__(self):
        return len(self.cuts)

    def add(self, cuts):
        self.cuts.extend(cuts)

    @property
    def generated(self):
        return Counter(cut.origin for cut in self.cuts)

    @property
    def applied(self):
        return Counter(cut.origin for cut in self.cuts if cut.applied)

    def pending(self):
        return [cut for cut in self.cuts if not cut.applied and cut.age <= MAX_AGE]

    def age(self):
        for cut in self.pending():
            cut.age += 1


def select_cuts(pool, x_lp, max_cuts=20, parallelism_thresh=0.9, objective=None):
    """
    Greedy selection by score = efficacy + 0.1 * objective parallelism.

    Candidates are rescored at x_lp; a candidate more parallel than
    `parallelism_thresh` to an already selected cut is skipped. Selected cuts
    are marked applied, the remaining pending cuts age by one round.
    """
    if max_cuts < 0:
        raise ValueError('max_cuts must be >= 0.')
    candidates = []
    for order, cut in enumerate(pool.pending()):
        cut.efficacy = cut_efficacy(cut, x_lp)
        if objective is not None:
            cut.obj_parallelism = objective_parallelism(cut, objective)
        if cut.efficacy > MIN_EFFICACY:
            candidates.append((-cut.score, order, cut))
    candidates.sort(key=lambda item: (item[0], item[1]))

    selected = []
    for _, _, cut in candidates:
        if len(selected) >= max_cuts:
            break
        if any(parallelism(cut, other) > parallelism_thresh for other in selected):
            continue
        selected.append(cut)
    for cut in selected:
        cut.applied = True
    pool.age()
    logger.debug('Selected %d of %d candidate cuts', len(selected), len(candidates))
    return selected
