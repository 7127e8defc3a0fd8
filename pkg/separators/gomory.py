"""
Gomory fractional and Gomory mixed-integer cuts read off optimal tableau rows.

Nonbasic columns are shifted by their global bounds, never the node bounds,
so every cut is valid for the whole instance and may be kept across nodes.
"""

import logging
import math

import numpy as np

from instances.problem import EQ, GE, LE
from lp.simplex import tableau_row
from .base import FRAC_TOL

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-9


def _frac(values):
    return values - np.floor(values)


class _ShiftedRow:
    """
    A tableau row  x_B + sum_j alpha_j t_j = beta  over nonnegative shifted
    nonbasic variables t_j, together with what is needed to map back to x.
    """

    def __init__(self, context, column):
        self.context = context
        problem = context.problem
        solution = context.solution
        n = problem.num_vars
        row = tableau_row(problem, solution, column)
        basic = set(solution.basis.basic)
        at_upper = solution.basis.at_upper
        integer = context.instance.integer

        self.columns = []
        self.alphas = []
        self.integral = []
        self.kinds = []
        beta = row.rhs
        for j in np.flatnonzero(np.abs(row.coefficients) > ZERO_TOL):
            if j in basic:
                continue
            alpha = float(row.coefficients[j])
            if j < n:
                if j in at_upper:
                    bound = context.upper[j]
                    kind = 'upper'
                    shifted = -alpha
                else:
                    bound = context.lower[j]
                    kind = 'lower'
                    shifted = alpha
                if not math.isfinite(bound):
                    raise ValueError('unbounded nonbasic')
                beta -= alpha * bound
                self.integral.append(bool(integer[j]))
            else:
                i = j - n
                sense = problem.senses[i]
                if sense == EQ:
                    continue
                kind = LE if sense == LE else GE
                shifted = alpha if sense == LE else -alpha
                self.integral.append(context.slack_integral[i])
            self.columns.append(int(j))
            self.alphas.append(shifted)
            self.kinds.append(kind)
        self.alphas = np.array(self.alphas, dtype=float)
        self.integral = np.array(self.integral, dtype=bool)
        self.beta = beta

    def to_le(self, weights, rhs):
        """Map  sum_j weights_j t_j >= rhs  back to a dense  pi . x <= pi0."""
        problem = self.context.problem
        n = problem.num_vars
        dense = np.zeros(n)
        constant = 0.0
        for j, kind, weight in zip(self.columns, self.kinds, weights):
            if weight == 0.0:
                continue
            if kind == 'lower':
                dense[j] += weight
                constant -= weight * self.context.lower[j]
            elif kind == 'upper':
                dense[j] -= weight
                constant += weight * self.context.upper[j]
            else:
                i = j - n
                if kind == LE:
                    dense -= weight * problem.matrix[i]
                    constant += weight * problem.rhs[i]
                else:
                    dense += weight * problem.matrix[i]
                    constant -= weight * problem.rhs[i]
        return -dense, constant - rhs


def _shifted_rows(context):
    for column in context.fractional_basics:
        try:
            shifted = _ShiftedRow(context, column)
        except ValueError:
            continue
        f0 = shifted.beta - math.floor(shifted.beta)
        if FRAC_TOL < f0 < 1 - FRAC_TOL:
            yield shifted, f0


def separate_gomory_fractional(context):
    """Chvatal-Gomory cuts from rows whose nonbasic part is all integer."""
    cuts = []
    for shifted, f0 in _shifted_rows(context):
        if not np.all(shifted.integral):
            continue
        weights = _frac(shifted.alphas)
        weights[(weights < ZERO_TOL) | (weights > 1 - ZERO_TOL)] = 0.0
        coefficients, rhs = shifted.to_le(weights, f0)
        cut = context.finish(coefficients, rhs, 'gomory_fractional')
        if cut is not None:
            cuts.append(cut)
    logger.debug('gomory_fractional: %d cuts', len(cuts))
    return cuts


def separate_gomory_mir(context):
    """Gomory mixed-integer cuts; continuous nonbasics take the MIR coefficient."""
    cuts = []
    for shifted, f0 in _shifted_rows(context):
        alphas = shifted.alphas
        weights = np.zeros(len(alphas))
        fj = _frac(alphas)
        ints = shifted.integral
        weights[ints] = np.where(fj[ints] <= f0, fj[ints] / f0, (1 - fj[ints]) / (1 - f0))
        conts = ~ints
        weights[conts] = np.where(alphas[conts] > 0, alphas[conts] / f0, -alphas[conts] / (1 - f0))
        weights[np.abs(weights) < ZERO_TOL] = 0.0
        coefficients, rhs = shifted.to_le(weights, 1.0)
        cut = context.finish(coefficients, rhs, 'gomory_mir')
        if cut is not None:
            cuts.append(cut)
    logger.debug('gomory_mir: %d cuts', len(cuts))
    return cuts
