"""
Complemented mixed-integer rounding on aggregations of base rows.

Rows are combined with their LP dual magnitudes as weights, variables are
substituted by their closest global bound and the MIR formula is applied
for a handful of scaling factors; the most efficacious cut per aggregation
is kept.
"""

import logging
import math

import numpy as np

from .base import FRAC_TOL

logger = logging.getLogger(__name__)

MAX_AGGREGATION = 3
MAX_START_ROWS = 30
MAX_DELTAS = 8
TIGHT_TOL = 1e-6


def _oriented_rows(context):
    """Base rows in <= orientation, dual-weighted, tightest / largest dual first."""
    structure = context.structure
    duals = context.solution.duals
    x = context.x
    candidates = []
    for le_row in structure.le_rows:
        y = float(duals[le_row.row]) if le_row.row < len(duals) else 0.0
        # a <= row carries a nonpositive dual in a minimization
        if y != 0.0 and (y < 0) != (le_row.sign > 0):
            continue
        slack = le_row.rhs - float(le_row.values @ x[le_row.indices])
        if abs(y) <= 1e-9 and slack > TIGHT_TOL:
            continue
        candidates.append((le_row, abs(y), slack))
    candidates.sort(key=lambda item: (-item[1], item[2], item[0].row))
    return candidates


def _aggregations(context):
    n = context.problem.num_vars
    candidates = _oriented_rows(context)
    for p, (start, start_weight, _) in enumerate(candidates[:MAX_START_ROWS]):
        dense = np.zeros(n)
        dense[start.indices] = start.values
        rhs = start.rhs
        used = {start.row}
        yield dense.copy(), rhs
        scale = start_weight if start_weight > 0 else 1.0
        for le_row, weight, _ in candidates[p + 1:]:
            if len(used) >= MAX_AGGREGATION:
                break
            if le_row.row in used or weight <= 0.0:
                continue
            if not np.any(dense[le_row.indices]):
                continue
            w = weight / scale
            dense[le_row.indices] += w * le_row.values
            rhs += w * le_row.rhs
            used.add(le_row.row)
            yield dense.copy(), rhs


def _mir(context, coefficients, rhs):
    """Best MIR cut of  coefficients . x <= rhs  over the candidate scalings, or None."""
    x = context.x
    lower, upper = context.lower, context.upper
    integer = context.instance.integer
    support = np.flatnonzero(np.abs(coefficients) > 1e-12)
    if not len(support) or not np.any(integer[support]):
        return None

    # x_j = l_j + x'_j (complemented=False) or x_j = u_j - x'_j (complemented=True)
    complemented = np.zeros(len(coefficients), dtype=bool)
    substituted = coefficients.copy()
    beta = rhs
    for j in support:
        lo, hi = lower[j], upper[j]
        if not math.isfinite(lo) and not math.isfinite(hi):
            return None
        use_upper = not math.isfinite(lo) or (math.isfinite(hi) and hi - x[j] < x[j] - lo)
        if use_upper:
            complemented[j] = True
            beta -= coefficients[j] * hi
            substituted[j] = -coefficients[j]
        else:
            beta -= coefficients[j] * lo

    int_support = support[integer[support]]
    shifted_x = np.where(complemented, upper - x, x - lower)
    deltas = [1.0]
    for j in int_support:
        value = abs(substituted[j])
        if value > 1e-6 and shifted_x[j] > 1e-6 and value not in deltas:
            deltas.append(value)
        if len(deltas) >= MAX_DELTAS:
            break

    best = None
    for delta in deltas:
        scaled_beta = beta / delta
        f0 = scaled_beta - math.floor(scaled_beta)
        if not FRAC_TOL < f0 < 1 - FRAC_TOL:
            continue
        shifted_coefficients = np.zeros(len(coefficients))
        for j in support:
            a = substituted[j] / delta
            if integer[j]:
                fa = a - math.floor(a)
                shifted_coefficients[j] = math.floor(a) + max(0.0, fa - f0) / (1 - f0)
            elif a < 0:
                shifted_coefficients[j] = a / (1 - f0)
        cut_rhs = float(math.floor(scaled_beta))
        # undo the bound substitution
        dense = np.where(complemented, -shifted_coefficients, shifted_coefficients)
        for j in np.flatnonzero(shifted_coefficients):
            bound = upper[j] if complemented[j] else lower[j]
            cut_rhs += dense[j] * bound
        cut = context.finish(dense, cut_rhs, 'cmir_aggregation')
        if cut is not None and (best is None or cut.efficacy > best.efficacy):
            best = cut
    return best


def separate_cmir(context):
    cuts = []
    seen = set()
    for coefficients, rhs in _aggregations(context):
        cut = _mir(context, coefficients, rhs)
        if cut is None:
            continue
        key = (tuple(cut.indices.tolist()), tuple(np.round(cut.values / cut.norm, 9).tolist()))
        if key in seen:
            continue
        seen.add(key)
        cuts.append(cut)
    logger.debug('cmir_aggregation: %d cuts', len(cuts))
    return cuts
