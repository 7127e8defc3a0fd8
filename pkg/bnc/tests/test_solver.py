import statistics
from collections import Counter

import numpy as np
from django.test import SimpleTestCase, tag
from scipy.stats import spearmanr

from bnc.params import BnCParams
from bnc.schedule import ConfigSchedule, default_schedule
from bnc.serializers import SolveResultSerializer
from bnc.solver import SolveResult, SolveStatus, effort, relative_gap, solve
from instances.generators import (
    generate_bin_packing, generate_comb_auction, generate_indep_set, generate_max_cut,
    generate_packing,
)
from instances.oracle import brute_force_opt
from instances.problem import GE, LE, build_instance
from lp.problem import LpProblem
from lp.simplex import solve_lp
from separators.config import SeparatorConfig

OFF = SeparatorConfig.all_off()
ON = SeparatorConfig.all_on()


def random_binary_instance(rng, n=8, m=4, name='binary'):
    """max c x  s.t. random knapsack rows over n binaries."""
    rows = []
    rhs = []
    for _ in range(m):
        weights = rng.integers(1, 10, size=n)
        rows.append({j: int(w) for j, w in enumerate(weights)})
        rhs.append(float(weights.sum() // 2))
    return build_instance(
        name=name, objective=(-rng.integers(1, 20, size=n)).astype(float).tolist(),
        rows=rows, senses=[LE] * m, rhs=rhs, lower=[0] * n, upper=[1] * n,
        integer=[True] * n,
    )


def small_suite(count):
    """Instances of every class with at most 12 integer variables."""
    makers = (
        lambda s: generate_packing(3, 3, s),
        lambda s: generate_bin_packing(3, 3, s),
        lambda s: generate_max_cut(n_vertices=4, n_edges=5, seed=s),
        lambda s: generate_comb_auction(n_items=4, n_bids=8, seed=s),
        lambda s: generate_indep_set(10, seed=s),
    )
    for k in range(count):
        yield makers[k % len(makers)](1000 + k)


class SolveTest(SimpleTestCase):
    """Test branch-and-cut outcomes against enumeration."""

    def test_all_off_matches_enumeration(self):
        """Test the pure branch-and-bound optimum equals the brute-force optimum."""
        rng = np.random.default_rng(5)
        for k in range(5):
            instance = random_binary_instance(rng, name=f'binary{k}')
            result = solve(instance, ConfigSchedule.constant(OFF))
            self.assertEqual(result.status, SolveStatus.OPTIMAL)
            self.assertAlmostEqual(result.objective, brute_force_opt(instance).objective, delta=1e-6)
            self.assertEqual(sum(result.sep_calls.values()), 0)

    def test_all_on_matches_enumeration(self):
        """Test cuts do not change the optimum."""
        rng = np.random.default_rng(6)
        for k in range(5):
            instance = random_binary_instance(rng, name=f'binary{k}')
            result = solve(instance)
            self.assertEqual(result.status, SolveStatus.OPTIMAL)
            self.assertAlmostEqual(result.objective, brute_force_opt(instance).objective, delta=1e-6)
            self.assertLessEqual(result.best_bound, result.objective + 1e-6)
            self.assertEqual(result.gap, 0.0)

    def test_infeasible_instance(self):
        """Test an integer-infeasible instance is reported infeasible."""
        instance = build_instance(
            name='infeasible', objective=[1.0, 1.0], rows=[{0: 1, 1: 1}], senses=[GE],
            rhs=[3.0], lower=[0, 0], upper=[1, 1], integer=[True, True],
        )
        self.assertEqual(solve(instance).status, SolveStatus.INFEASIBLE)

    def test_near_integral_point_with_infeasible_rounding(self):
        """Test a vertex within the integrality tolerance whose rounding breaks a row is branched on."""
        instance = build_instance(
            name='tight', objective=[-1.0], rows=[{0: 30}], senses=[LE], rhs=[29.99999],
            lower=[0], upper=[1], integer=[True],
        )
        root = solve_lp(LpProblem.from_instance(instance))
        self.assertAlmostEqual(root.x[0], 1.0, delta=1e-6)
        self.assertFalse(instance.is_feasible(np.round(root.x)))

        result = solve(instance, ConfigSchedule.constant(OFF))
        self.assertEqual(result.status, SolveStatus.OPTIMAL)
        self.assertEqual(result.objective, 0.0)
        self.assertTrue(instance.is_feasible(result.solution))
        self.assertEqual(result.solution.tolist(), [0.0])
        self.assertGreater(result.nodes, 1)

    def test_default_schedule_equals_explicit_all_on(self):
        """Test the default schedule and an explicit all-on schedule solve identically."""
        instance = generate_max_cut(n_vertices=6, n_edges=9, seed=3)
        implicit = solve(instance)
        explicit = solve(instance, ConfigSchedule.constant(ON))
        self.assertEqual(implicit.nodes, explicit.nodes)
        self.assertEqual(implicit.effort, explicit.effort)

    def test_deterministic(self):
        """Test identical inputs give identical counters."""
        instance = generate_indep_set(20, seed=12)
        first, second = solve(instance, seed=4), solve(instance, seed=4)
        self.assertEqual(first.nodes, second.nodes)
        self.assertEqual(first.pivots, second.pivots)
        self.assertEqual(first.sep_calls, second.sep_calls)
        self.assertEqual(first.cuts_applied, second.cuts_applied)
        self.assertEqual(first.objective, second.objective)

    def test_gap_limit(self):
        """Test a gap-limited solve returns a gap within the limit."""
        instance = generate_packing(10, 6, seed=2)
        result = solve(instance, ConfigSchedule.constant(OFF), BnCParams(gap_limit=0.1))
        self.assertIn(result.status, (SolveStatus.GAP_REACHED, SolveStatus.OPTIMAL))
        if result.status == SolveStatus.GAP_REACHED:
            self.assertLessEqual(result.gap, 0.1 + 1e-9)

    def test_node_limit(self):
        """Test the node limit stops the tree search after the root."""
        instance = generate_max_cut(n_vertices=6, n_edges=10, seed=1)
        result = solve(instance, ConfigSchedule.constant(OFF), BnCParams(node_limit=1))
        self.assertEqual(result.status, SolveStatus.NODE_LIMIT)
        self.assertEqual(result.nodes, 1)
        self.assertLessEqual(result.best_bound, result.objective + 1e-6)

    def test_hard_stop(self):
        """Test exceeding the ratio of the reference effort stops the solve."""
        instance = generate_max_cut(n_vertices=6, n_edges=10, seed=1)
        result = solve(instance, reference_effort=1.0)
        self.assertEqual(result.status, SolveStatus.HARD_STOP)
        self.assertGreater(result.effort, 3.0)

    def test_effort_limit(self):
        """Test the absolute effort budget ends the solve with a gap."""
        instance = generate_packing(10, 6, seed=2)
        result = solve(instance, ConfigSchedule.constant(OFF), BnCParams(effort_limit=50.0))
        self.assertIn(result.status, (SolveStatus.EFFORT_LIMIT, SolveStatus.OPTIMAL))
        self.assertGreaterEqual(result.gap, 0.0)
        self.assertLessEqual(result.gap, 1.0)

    def test_root_rounds_bounded(self):
        """Test the root never runs more than R separation rounds."""
        instance = generate_indep_set(20, seed=3)
        params = BnCParams(max_sep_rounds_root=2, node_sep_freq=0)
        result = solve(instance, params=params)
        self.assertLessEqual(result.sep_rounds, 2)

    def test_policy_replaces_scheduled_config(self):
        """Test the policy hook sees a snapshot at each update round and can override it."""
        instance = generate_indep_set(20, seed=3)
        seen = []

        def policy(update_index, snapshot):
            seen.append((update_index, snapshot.round_index))
            return SeparatorConfig.from_names(['clique']) if update_index == 1 else None

        schedule = ConfigSchedule(((0, OFF), (2, ON)))
        result = solve(instance, schedule, policy=policy)
        self.assertEqual(seen[0], (0, 0))
        if len(seen) > 1:
            self.assertEqual(seen[1], (1, 2))
            self.assertEqual(result.applied_updates[1][1].names, ('clique',))
            self.assertEqual(set(result.sep_calls), {'clique'})
        self.assertIn(0, result.snapshots)

    def test_result_serializes(self):
        """Test the JSON view carries the status and per-separator counters."""
        instance = generate_max_cut(n_vertices=5, n_edges=6, seed=2)
        data = SolveResultSerializer(solve(instance)).data
        self.assertEqual(data['status'], 'optimal')
        self.assertEqual(len(data['sep_calls']), 8)

    @tag('slow')
    def test_random_schedules_match_enumeration(self):
        """Test 20 random schedules per instance never change the optimum on a 200-instance suite."""
        rng = np.random.default_rng(17)
        layouts = ((0,), (0, 3), (0, 2, 5))
        for instance in small_suite(200):
            self.assertLessEqual(int(instance.integer.sum()), 12)
            expected = brute_force_opt(instance).objective
            for k in range(20):
                rounds = layouts[k % len(layouts)]
                configs = [SeparatorConfig(int(bits)) for bits in rng.integers(0, 256, size=len(rounds))]
                result = solve(instance, ConfigSchedule.from_configs(rounds, configs))
                self.assertEqual(result.status, SolveStatus.OPTIMAL, instance.name)
                self.assertAlmostEqual(result.objective, expected, delta=1e-6, msg=instance.name)
                self.assertTrue(instance.is_feasible(result.solution), instance.name)

    @tag('slow')
    def test_cuts_reduce_nodes_in_the_median(self):
        """Test all-on processes no more nodes than all-off in the median over 30 seeds."""
        with_cuts, without_cuts = [], []
        for seed in range(30):
            instance = generate_packing(8, 4, seed=seed)
            with_cuts.append(solve(instance, ConfigSchedule.constant(ON)).nodes)
            without_cuts.append(solve(instance, ConfigSchedule.constant(OFF)).nodes)
        self.assertLessEqual(statistics.median(with_cuts), statistics.median(without_cuts))


class EffortTest(SimpleTestCase):
    """Test the deterministic effort surrogate."""

    def test_zero_counters(self):
        """Test an empty result has zero effort."""
        self.assertEqual(effort(SolveResult(status=SolveStatus.OPTIMAL)), 0.0)

    def test_linear_in_counters(self):
        """Test doubling every counter doubles effort."""
        result = SolveResult(status=SolveStatus.OPTIMAL, nodes=3, pivots=40,
                             sep_calls=Counter({'clique': 2, 'oddcycle': 1}))
        doubled = SolveResult(status=SolveStatus.OPTIMAL, nodes=6, pivots=80,
                              sep_calls=Counter({'clique': 4, 'oddcycle': 2}))
        self.assertAlmostEqual(effort(doubled), 2 * effort(result))

    def test_strictly_monotone(self):
        """Test each counter increases effort."""
        base = SolveResult(status=SolveStatus.OPTIMAL, nodes=1, pivots=1)
        base_effort = effort(base)
        self.assertGreater(effort(SolveResult(status=SolveStatus.OPTIMAL, nodes=2, pivots=1)), base_effort)
        self.assertGreater(effort(SolveResult(status=SolveStatus.OPTIMAL, nodes=1, pivots=2)), base_effort)
        self.assertGreater(effort(SolveResult(status=SolveStatus.OPTIMAL, nodes=1, pivots=1,
                                              sep_calls=Counter({'zerohalf': 1}))), base_effort)

    def test_relative_gap(self):
        """Test the gap is capped at one and zero at equality."""
        self.assertEqual(relative_gap(10.0, 10.0), 0.0)
        self.assertAlmostEqual(relative_gap(-10.0, -12.0), 0.2)
        self.assertEqual(relative_gap(1.0, -100.0), 1.0)
        self.assertEqual(relative_gap(float('inf'), 0.0), 1.0)

    @tag('slow')
    def test_effort_tracks_wall_time(self):
        """Test effort rank-correlates with wall time over 20 instances of growing size."""
        efforts, walls = [], []
        for k in range(20):
            instance = generate_packing(4 + k // 2, 3 + k // 4, seed=300 + k)
            result = solve(instance)
            self.assertGreater(result.wall_seconds, 0.0)
            efforts.append(result.effort)
            walls.append(result.wall_seconds)
        rho, _ = spearmanr(efforts, walls)
        self.assertGreater(rho, 0.8)
