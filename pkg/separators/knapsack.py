import logging

import numpy as np

logger = logging.getLogger(__name__)


def _cover(weights, capacity, z):
    """Greedy cover by (1 - z*) / a, then made minimal; None when the row has no cover."""
    if weights.sum() <= capacity + 1e-9:
        return None
    order = sorted(range(len(weights)), key=lambda k: ((1 - z[k]) / weights[k], k))
    cover, total = [], 0.0
    for k in order:
        cover.append(k)
        total += weights[k]
        if total > capacity + 1e-9:
            break
    for k in sorted(cover, key=lambda k: (-(1 - z[k]), -k)):
        if total - weights[k] > capacity + 1e-9:
            cover.remove(k)
            total -= weights[k]
    return cover


def knapsack_cover_inequality(weights, capacity, z):
    """
    Extended cover inequality  sum_{E(C)} z_j <= |C| - 1  of the knapsack
    weights . z <= capacity with positive weights over binaries, as the list
    of positions in E(C) and the rhs; None without a cover.
    """
    weights = np.asarray(weights, dtype=float)
    z = np.asarray(z, dtype=float)
    cover = _cover(weights, capacity, z)
    if cover is None:
        return None
    heaviest = max(weights[k] for k in cover)
    extended = sorted(set(cover) | {k for k in range(len(weights)) if weights[k] >= heaviest})
    return extended, len(cover) - 1


def separate_knapsack_cover(context):
    structure = context.structure
    x = context.x
    n = context.problem.num_vars
    cuts = []
    for le_row in structure.le_rows:
        indices, values = le_row.indices, le_row.values
        if len(indices) < 2 or not np.all(structure.binary[indices]):
            continue
        # z_j = 1 - x_j for negative coefficients
        negative = values < 0
        weights = np.abs(values)
        capacity = le_row.rhs + weights[negative].sum()
        if capacity < 0:
            continue
        z = np.where(negative, 1 - x[indices], x[indices])
        result = knapsack_cover_inequality(weights, capacity, z)
        if result is None:
            continue
        members, rhs = result
        dense = np.zeros(n)
        for k in members:
            if negative[k]:
                dense[indices[k]] -= 1.0
                rhs -= 1
            else:
                dense[indices[k]] += 1.0
        cut = context.finish(dense, float(rhs), 'knapsack_cover')
        if cut is not None:
            cuts.append(cut)
    logger.debug('knapsack_cover: %d cuts', len(cuts))
    return cuts
