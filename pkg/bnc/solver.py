"""
Branch-and-cut over the in-house dual simplex.

Best-bound node selection (FIFO among equal bounds), most-fractional
branching, up to R separation rounds at the root and one round at every
node whose depth is a multiple of the node separation frequency. A single
global round counter indexes the configuration schedule.
"""

import enum
import heapq
import itertools
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import LpNumericalError
from lp.problem import LpProblem
from lp.simplex import LpStatus, resolve_with_rows, solve_lp
from separators.base import SeparationContext
from separators.config import SEPARATOR_NAMES
from separators.cuts import CutPool, select_cuts
from separators.registry import SEPARATORS, separate
from .params import BnCParams
from .schedule import default_schedule

logger = logging.getLogger(__name__)

INT_TOL = 1e-6
GAP_EPS = 1e-10
STALL_ROUNDS = 3
STALL_TOL = 1e-7


class SolveStatus(str, enum.Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    GAP_REACHED = 'gap_reached'
    NODE_LIMIT = 'node_limit'
    EFFORT_LIMIT = 'effort_limit'
    HARD_STOP = 'hard_stop'
    NUMERICAL_ERROR = 'numerical_error'


@dataclass
class LpSnapshot:
    """LP state immediately before a scheduled update round, kept for feature encoding."""
    round_index: int
    update_index: int
    problem: LpProblem
    solution: object
    cuts: list
    depth: int = 0
    incumbent: float = math.inf


@dataclass
class SolveResult:
    status: SolveStatus
    objective: float = math.inf
    best_bound: float = -math.inf
    gap: float = 1.0
    nodes: int = 0
    sep_rounds: int = 0
    pivots: int = 0
    sep_calls: Counter = field(default_factory=Counter)
    cuts_generated: Counter = field(default_factory=Counter)
    cuts_applied: Counter = field(default_factory=Counter)
    effort: float = 0.0
    wall_seconds: float = 0.0
    root_bound: float = -math.inf
    solution: np.ndarray = None
    applied_updates: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def is_optimal(self):
        return self.status == SolveStatus.OPTIMAL

    def measure(self, metric='effort'):
        return self.wall_seconds if metric == 'wall' else self.effort


def relative_gap(objective, bound):
    """|z - bound| / max(|z|, 1e-10), capped at 1; 1 without an incumbent."""
    if not math.isfinite(objective):
        return 1.0
    if not math.isfinite(bound):
        return 1.0
    return min(1.0, abs(objective - bound) / max(abs(objective), GAP_EPS))


def effort(result, params=None):
    """Weighted work units: pivots, cost-weighted separator calls and nodes."""
    params = params or BnCParams()
    costs = {separator.name: separator.cost for separator in SEPARATORS}
    sep_work = sum(costs[name] * calls for name, calls in result.sep_calls.items())
    return params.w_pivot * result.pivots + params.w_sepcall * sep_work + params.w_node * result.nodes


@dataclass(order=True)
class _Node:
    bound: float
    sequence: int
    depth: int = field(compare=False)
    lower: np.ndarray = field(compare=False, repr=False)
    upper: np.ndarray = field(compare=False, repr=False)
    basis: object = field(compare=False, default=None, repr=False)
    basis_rows: int = field(compare=False, default=0)


class _Stop(Exception):

    def __init__(self, status):
        self.status = status


class BranchAndCut:

    def __init__(self, instance, schedule, params, seed=0, policy=None, reference=None):
        self.instance = instance
        self.schedule = schedule
        self.params = params
        self.policy = policy
        self.reference = reference
        self.problem = LpProblem.from_instance(instance)
        self.pool = CutPool()
        self.applied_cuts = []
        self.round_counter = 0
        self.overrides = {}
        self.result = SolveResult(status=SolveStatus.OPTIMAL, seed=seed)
        self.incumbent = math.inf
        self.incumbent_x = None
        self.sequence = itertools.count()
        self.started = time.perf_counter()
        self.integer = instance.integer
        self.current_bound = math.inf

    # ── bookkeeping ──────────────────────────────────────────────────────────

    def _refresh_effort(self):
        self.result.effort = effort(self.result, self.params)
        self.result.wall_seconds = time.perf_counter() - self.started

    def _check_limits(self):
        self._refresh_effort()
        measured = self.result.measure(self.params.metric)
        if self.reference is not None and measured > self.params.hard_stop_ratio * self.reference:
            logger.warning('%s: hard stop at %.1f (reference %.1f)',
                           self.instance.name, measured, self.reference)
            raise _Stop(SolveStatus.HARD_STOP)
        if self.params.effort_limit is not None and measured > self.params.effort_limit:
            raise _Stop(SolveStatus.EFFORT_LIMIT)

    def _lp(self, problem, basis=None):
        solution = solve_lp(problem, warm_basis=basis)
        self.result.pivots += solution.pivot_count
        if solution.status in (LpStatus.ITERATION_LIMIT, LpStatus.UNBOUNDED):
            raise LpNumericalError(f'{self.instance.name}: LP ended {solution.status.value}.')
        return solution

    def _try_incumbent(self, x):
        point = np.where(self.integer, np.round(x), x)
        if not self.instance.is_feasible(point, tol=1e-6):
            return False
        value = float(self.instance.objective @ point)
        if value < self.incumbent - 1e-9:
            self.incumbent, self.incumbent_x = value, point
            logger.debug('%s: incumbent %.6g', self.instance.name, value)
        return True

    def _prunable(self, bound):
        if not math.isfinite(self.incumbent):
            return False
        return bound >= self.incumbent - 1e-9 * max(1.0, abs(self.incumbent))

    # ── separation ───────────────────────────────────────────────────────────

    def _active_config(self):
        started = [n for n in self.schedule.update_rounds if n <= self.round_counter]
        if not started:
            return self.schedule.prefix
        n = started[-1]
        return self.overrides.get(n, self.schedule.config_at(n))

    def _at_update(self, problem, solution, depth):
        j = self.schedule.update_index_at(self.round_counter)
        if j is None or self.round_counter in self.result.snapshots:
            return
        snapshot = LpSnapshot(self.round_counter, j, problem.copy(), solution,
                              list(self.applied_cuts), depth, self.incumbent)
        self.result.snapshots[self.round_counter] = snapshot
        if self.policy is not None:
            config = self.policy(j, snapshot)
            if config is not None:
                self.overrides[self.round_counter] = config
        self.result.applied_updates.append((self.round_counter, self._active_config()))

    def _separation_round(self, problem, solution, depth):
        """One round at the current counter; returns the re-solved LP and the cuts applied."""
        self._at_update(problem, solution, depth)
        config = self._active_config()
        self.round_counter += 1
        self.result.sep_rounds += 1
        if not config.active:
            return solution, []
        context = SeparationContext(self.instance, problem, solution)
        for k in config.active:
            cuts = separate(k, context)
            name = SEPARATOR_NAMES[k]
            self.result.sep_calls[name] += 1
            self.result.cuts_generated[name] += len(cuts)
            self.pool.add(cuts)
        selected = select_cuts(self.pool, solution.x, self.params.max_cuts_per_round,
                               self.params.parallelism_thresh, self.instance.objective)
        if not selected:
            return solution, []
        rows = [cut.as_row() for cut in selected]
        if problem is not self.problem:
            self.problem.add_rows(rows)
        solution = resolve_with_rows(problem, rows, solution.basis)
        self.result.pivots += solution.pivot_count
        if solution.status == LpStatus.ITERATION_LIMIT:
            raise LpNumericalError(f'{self.instance.name}: LP iteration limit after cuts.')
        for cut in selected:
            self.result.cuts_applied[cut.origin] += 1
        self.applied_cuts.extend(selected)
        return solution, selected

    def _root_rounds(self, solution):
        stalled = 0
        limit = self.params.max_sep_rounds_root
        while self.round_counter < limit and solution.is_optimal:
            if self._integral(solution.x) or self._prunable(solution.objective):
                break
            before = solution.objective
            solution, selected = self._separation_round(self.problem, solution, 0)
            self._check_limits()
            if not solution.is_optimal:
                break
            self._try_incumbent(solution.x)
            improved = solution.objective - before > STALL_TOL * max(1.0, abs(before))
            stalled = 0 if improved else stalled + 1
            if not selected or stalled >= STALL_ROUNDS:
                # idle rounds are skipped up to the next scheduled change
                upcoming = self.schedule.next_update_after(self.round_counter - 1)
                if upcoming is None or upcoming >= limit:
                    break
                self.round_counter = upcoming
                stalled = 0
        return solution

    # ── tree search ──────────────────────────────────────────────────────────

    def _integral(self, x):
        values = x[self.integer]
        return bool(np.all(np.abs(values - np.round(values)) <= INT_TOL))

    def _branch_variable(self, x):
        fractionality = np.where(self.integer, np.abs(x - np.round(x)), 0.0)
        j = int(np.argmax(fractionality))
        return j if fractionality[j] > INT_TOL else None

    def _rounding_branch(self, node, x):
        """
        Branch variable for a point that is integral within INT_TOL but whose
        rounding breaks a row: the largest nonzero offset whose floor and ceil
        both stay inside the node box.
        """
        offset = np.where(self.integer, np.abs(x - np.round(x)), 0.0)
        splittable = (offset > 0) & (np.floor(x) >= node.lower) & (np.ceil(x) <= node.upper)
        if not np.any(splittable):
            return None
        return int(np.argmax(np.where(splittable, offset, -1.0)))

    def _children(self, node, solution, j):
        value = solution.x[j]
        down_upper = node.upper.copy()
        down_upper[j] = math.floor(value)
        up_lower = node.lower.copy()
        up_lower[j] = math.ceil(value)
        rows = self.problem.num_rows
        for lower, upper in ((node.lower, down_upper), (up_lower, node.upper)):
            yield _Node(solution.objective, next(self.sequence), node.depth + 1,
                        lower, upper, solution.basis, rows)

    def _node_lp(self, node):
        problem = self.problem.with_bounds(node.lower, node.upper)
        basis = None
        if node.basis is not None:
            basis = node.basis.extended(problem.num_vars, node.basis_rows,
                                        problem.num_rows - node.basis_rows)
        return problem, self._lp(problem, basis)

    def _best_bound(self, heap, current=math.inf):
        open_bound = heap[0].bound if heap else math.inf
        return min(open_bound, current, self.incumbent)

    def _finish(self, status, heap):
        result = self.result
        result.status = status
        result.objective = self.incumbent
        result.solution = self.incumbent_x
        if status == SolveStatus.OPTIMAL:
            result.best_bound = self.incumbent
        elif status == SolveStatus.INFEASIBLE:
            result.best_bound = math.inf
        else:
            result.best_bound = self._best_bound(heap, self.current_bound)
        result.gap = 0.0 if status == SolveStatus.OPTIMAL else relative_gap(
            self.incumbent, result.best_bound)
        self._refresh_effort()
        return result

    def run(self):
        heap = []
        self.current_bound = math.inf
        try:
            root = _Node(-math.inf, next(self.sequence), 0,
                         self.instance.lower.copy(), self.instance.upper.copy())
            heapq.heappush(heap, root)
            while heap:
                node = heapq.heappop(heap)
                if self._prunable(node.bound):
                    continue
                self.current_bound = node.bound
                if node.depth == 0:
                    problem = self.problem
                    solution = self._lp(problem)
                else:
                    problem, solution = self._node_lp(node)
                self.result.nodes += 1
                if solution.status == LpStatus.INFEASIBLE:
                    self._check_limits()
                    continue
                if node.depth == 0:
                    self._try_incumbent(solution.x)
                    solution = self._root_rounds(solution)
                    self.result.root_bound = solution.objective
                elif (self.params.node_sep_freq and node.depth % self.params.node_sep_freq == 0
                      and not self._integral(solution.x) and not self._prunable(solution.objective)):
                    solution, _ = self._separation_round(problem, solution, node.depth)
                if solution.status == LpStatus.INFEASIBLE:
                    self._check_limits()
                    continue
                if self._prunable(solution.objective):
                    self._check_limits()
                    continue
                if self._integral(solution.x):
                    if self._try_incumbent(solution.x):
                        self._check_limits()
                        continue
                    j = self._rounding_branch(node, solution.x)
                    if j is None:
                        logger.warning('%s: integral-looking point at depth %d has no feasible rounding, node dropped',
                                       self.instance.name, node.depth)
                        self._check_limits()
                        continue
                else:
                    self._try_incumbent(solution.x)
                    j = self._branch_variable(solution.x)
                for child in self._children(node, solution, j):
                    heapq.heappush(heap, child)

                self.current_bound = math.inf
                self._check_limits()
                bound = self._best_bound(heap)
                if self.params.gap_limit > 0 and relative_gap(self.incumbent, bound) <= self.params.gap_limit:
                    return self._finish(SolveStatus.GAP_REACHED, heap)
                if self.result.nodes >= self.params.node_limit:
                    return self._finish(SolveStatus.NODE_LIMIT, heap)
        except _Stop as stop:
            return self._finish(stop.status, heap)
        except LpNumericalError as exc:
            logger.warning('%s: %s', self.instance.name, exc)
            return self._finish(SolveStatus.NUMERICAL_ERROR, heap)
        self.current_bound = math.inf
        if not math.isfinite(self.incumbent):
            return self._finish(SolveStatus.INFEASIBLE, heap)
        return self._finish(SolveStatus.OPTIMAL, heap)


def solve(instance, schedule=None, params=None, seed=0, policy=None, reference_effort=None):
    """
    Branch-and-cut solve of `instance` under a separator configuration schedule.

    `policy(update_index, snapshot)` may replace the scheduled config at each
    update round; `reference_effort` enables the hard stop at
    params.hard_stop_ratio times that value. The solve is deterministic; `seed`
    is recorded on the result.
    """
    schedule = schedule or default_schedule()
    params = params or BnCParams()
    solver = BranchAndCut(instance, schedule, params, seed, policy, reference_effort)
    result = solver.run()
    logger.debug('%s: %s z=%.6g bound=%.6g nodes=%d rounds=%d effort=%.0f',
                 instance.name, result.status.value, result.objective, result.best_bound,
                 result.nodes, result.sep_rounds, result.effort)
    return result
