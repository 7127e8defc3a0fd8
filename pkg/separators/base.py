from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from instances.problem import EQ, GE, LE
from .cuts import make_cut
from .structure import instance_structure

FRAC_TOL = 0.01


def fractionality(value):
    return abs(value - round(value))


@dataclass
class SeparationContext:
    """
    The LP state a separator works from: the instance, the current LP
    (node bounds plus every applied cut) and its optimal solution.
    """
    instance: object
    problem: object
    solution: object
    max_tableau_rows: int = 40
    structure: object = field(init=False)

    def __post_init__(self):
        if not self.solution.is_optimal:
            raise ValueError('Separation needs an optimal LP solution.')
        self.structure = instance_structure(self.instance)

    @property
    def x(self):
        return self.solution.x

    @property
    def lower(self):
        return self.structure.lower

    @property
    def upper(self):
        return self.structure.upper

    def finish(self, coefficients, rhs, origin):
        return make_cut(coefficients, rhs, origin, self.x, self.lower, self.upper,
                        objective=self.instance.objective)

    @cached_property
    def fractional_basics(self):
        """Basic integer columns with fractional value, most fractional first."""
        integer = self.instance.integer
        candidates = [
            j for j in self.solution.basis.basic
            if j < self.problem.num_vars and integer[j] and fractionality(self.x[j]) > FRAC_TOL
        ]
        candidates.sort(key=lambda j: (-fractionality(self.x[j]), j))
        return candidates[:self.max_tableau_rows]

    @cached_property
    def slack_integral(self):
        """Per LP row: whether its slack takes integer values on integer-feasible points."""
        integer = self.instance.integer
        flags = []
        for i in range(self.problem.num_rows):
            row = self.problem.matrix[i]
            support = np.flatnonzero(row)
            flags.append(
                bool(np.all(integer[support]))
                and bool(np.all(row[support] == np.round(row[support])))
                and float(self.problem.rhs[i]).is_integer()
            )
        return flags

    def slack_sign(self, i):
        """+1 when the slack of row i is >= 0, -1 when <= 0, 0 when fixed."""
        sense = self.problem.senses[i]
        return {LE: 1, GE: -1, EQ: 0}[sense]
