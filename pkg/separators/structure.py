"""Per-instance row analysis shared by the combinatorial separators."""

import functools
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from instances.problem import EQ, GE, LE


@dataclass(frozen=True)
class LeRow:
    """A base row written as  values . x[indices] <= rhs; `sign` is -1 when negated from >=."""
    row: int
    sign: int
    indices: np.ndarray
    values: np.ndarray
    rhs: float


class InstanceStructure:

    def __init__(self, instance):
        self.instance = instance
        # integer bounds rounded inward so bound shifts keep integrality
        self.lower = np.where(instance.integer, np.ceil(instance.lower - 1e-9), instance.lower)
        self.upper = np.where(instance.integer, np.floor(instance.upper + 1e-9), instance.upper)
        self.binary = np.array([instance.is_binary(j) for j in range(instance.num_vars)], dtype=bool)

        self.le_rows = []
        for i, sense in enumerate(instance.senses):
            indices, values = instance.row(i)
            if sense in (LE, EQ):
                self.le_rows.append(LeRow(i, 1, indices, values.copy(), float(instance.rhs[i])))
            if sense in (GE, EQ):
                self.le_rows.append(LeRow(i, -1, indices, -values, -float(instance.rhs[i])))

    def is_integral_row(self, le_row):
        """Only integer variables with integer coefficients and an integer rhs."""
        return (
            bool(np.all(self.instance.integer[le_row.indices]))
            and bool(np.all(le_row.values == np.round(le_row.values)))
            and float(le_row.rhs).is_integer()
        )

    def row_integral(self, i):
        """True when the slack of base row i is integer on every integer-feasible point."""
        indices, values = self.instance.row(i)
        return (
            bool(np.all(self.instance.integer[indices]))
            and bool(np.all(values == np.round(values)))
            and float(self.instance.rhs[i]).is_integer()
        )

    @functools.cached_property
    def conflict_graph(self):
        """
        Edges between binaries that cannot both be 1, read from set-packing
        rows: all variables binary, equal positive coefficients a and a <= rhs < 2a.
        """
        graph = nx.Graph()
        graph.add_nodes_from(np.flatnonzero(self.binary).tolist())
        for row in self.le_rows:
            if len(row.indices) < 2 or not np.all(self.binary[row.indices]):
                continue
            a = row.values[0]
            if a <= 0 or not np.allclose(row.values, a):
                continue
            if not (a <= row.rhs + 1e-9 and row.rhs < 2 * a - 1e-9):
                continue
            members = row.indices.tolist()
            for p, u in enumerate(members):
                for v in members[p + 1:]:
                    graph.add_edge(u, v)
        return graph

    def bound_at(self, j, at_upper):
        return self.upper[j] if at_upper else self.lower[j]

    def min_activity(self, indices, values):
        lo = np.where(values > 0, self.lower[indices], self.upper[indices])
        with np.errstate(invalid='ignore'):
            terms = values * lo
        return float(np.sum(terms)) if np.all(np.isfinite(terms)) else -math.inf


@functools.lru_cache(maxsize=256)
def instance_structure(instance):
    return InstanceStructure(instance)
