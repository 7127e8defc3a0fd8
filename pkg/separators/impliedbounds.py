"""
Implied-bound cuts: fixing a binary in a base row tightens the bound of
another variable in the same row, which gives the linking inequality
x_k <= u_k + (v - u_k) z  (or its lower-bound and z = 0 counterparts).
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

MAX_ROW_SIZE = 200
BOUND_TOL = 1e-6


def _min_terms(structure, indices, values):
    lo = np.where(values > 0, structure.lower[indices], structure.upper[indices])
    with np.errstate(invalid='ignore'):
        terms = values * lo
    return np.where(values == 0, 0.0, terms)


def _linking(n, k, z, at, implied, lower_side, structure):
    """Dense cut linking x_k to binary z when z = `at` implies bound `implied`."""
    dense = np.zeros(n)
    bound = structure.lower[k] if lower_side else structure.upper[k]
    if not math.isfinite(bound):
        return None
    # x_k <= bound + (implied - bound) * (z if at == 1 else 1 - z), mirrored for lower bounds
    gap = implied - bound
    if lower_side:
        dense[k] = -1.0
        rhs = -bound
        gap = -gap
    else:
        dense[k] = 1.0
        rhs = bound
    if at == 1:
        dense[z] -= gap
    else:
        dense[z] += gap
        rhs += gap
    return dense, rhs


def separate_implied_bounds(context):
    structure = context.structure
    n = context.problem.num_vars
    integer = context.instance.integer
    cuts, seen = [], set()
    for le_row in structure.le_rows:
        indices, values = le_row.indices, le_row.values
        if len(indices) < 2 or len(indices) > MAX_ROW_SIZE:
            continue
        binaries = [p for p, j in enumerate(indices) if structure.binary[j]]
        if not binaries:
            continue
        terms = _min_terms(structure, indices, values)
        if not np.all(np.isfinite(terms)):
            continue
        total = float(terms.sum())
        for p in binaries:
            z = indices[p]
            for at in (0, 1):
                # min activity with z fixed
                fixed_total = total - terms[p] + values[p] * at
                if fixed_total > le_row.rhs + BOUND_TOL:
                    dense = np.zeros(n)
                    if at == 1:
                        dense[z], rhs = 1.0, 0.0
                    else:
                        dense[z], rhs = -1.0, -1.0
                    candidates = [(dense, rhs)]
                else:
                    candidates = []
                    for q, k in enumerate(indices):
                        if q == p:
                            continue
                        a = values[q]
                        residual = (le_row.rhs - (fixed_total - terms[q])) / a
                        lower_side = a < 0
                        if integer[k]:
                            residual = math.ceil(residual - 1e-9) if lower_side else math.floor(residual + 1e-9)
                        if lower_side and residual <= structure.lower[k] + BOUND_TOL:
                            continue
                        if not lower_side and residual >= structure.upper[k] - BOUND_TOL:
                            continue
                        linked = _linking(n, k, z, at, residual, lower_side, structure)
                        if linked is not None:
                            candidates.append(linked)
                for dense, rhs in candidates:
                    cut = context.finish(dense, rhs, 'impliedbounds')
                    if cut is None:
                        continue
                    key = (tuple(cut.indices.tolist()), tuple(cut.values.tolist()), cut.rhs)
                    if key not in seen:
                        seen.add(key)
                        cuts.append(cut)
    logger.debug('impliedbounds: %d cuts', len(cuts))
    return cuts
