import itertools
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

MAX_ROWS = 30


def _candidate_rows(context):
    structure = context.structure
    x = context.x
    rows = []
    for le_row in structure.le_rows:
        if not structure.is_integral_row(le_row):
            continue
        slack = le_row.rhs - float(le_row.values @ x[le_row.indices])
        if slack < 1 - 1e-6:
            rows.append((slack, le_row.row, le_row.sign, le_row))
    rows.sort(key=lambda item: item[:3])
    return [item[3] for item in rows[:MAX_ROWS]]


def zero_half_cut(coefficients, rhs, x, lower, upper):
    """
    {0, 1/2}-cut of the integer inequality  coefficients . x <= rhs: odd
    coefficients are made even with the cheaper bound inequality, then the
    row is halved and rounded. None when the rhs ends up even or a needed
    bound is infinite.
    """
    coefficients = np.array(coefficients, dtype=float)
    for j in np.flatnonzero(np.mod(coefficients, 2) == 1):
        to_lower = x[j] - lower[j]
        to_upper = upper[j] - x[j]
        if math.isfinite(lower[j]) and (not math.isfinite(upper[j]) or to_lower <= to_upper):
            # add -x_j <= -l_j
            coefficients[j] -= 1
            rhs -= lower[j]
        elif math.isfinite(upper[j]):
            coefficients[j] += 1
            rhs += upper[j]
        else:
            return None
    if int(rhs) % 2 == 0:
        return None
    return coefficients / 2, math.floor(rhs / 2)


def separate_zerohalf(context):
    n = context.problem.num_vars
    rows = _candidate_rows(context)
    combinations = [(row,) for row in rows] + list(itertools.combinations(rows, 2))
    cuts, seen = [], set()
    for combination in combinations:
        if len({row.row for row in combination}) < len(combination):
            continue
        dense = np.zeros(n)
        rhs = 0.0
        for row in combination:
            dense[row.indices] += row.values
            rhs += row.rhs
        result = zero_half_cut(dense, rhs, context.x, context.lower, context.upper)
        if result is None:
            continue
        coefficients, cut_rhs = result
        cut = context.finish(coefficients, float(cut_rhs), 'zerohalf')
        if cut is None:
            continue
        key = (tuple(cut.indices.tolist()), tuple(cut.values.tolist()), cut.rhs)
        if key not in seen:
            seen.add(key)
            cuts.append(cut)
    logger.debug('zerohalf: %d cuts', len(cuts))
    return cuts
