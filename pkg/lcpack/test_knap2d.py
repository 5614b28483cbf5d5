import importlib.util
import os
import unittest

import numpy as np

from .core import BudgetExceededError, Item, KnapsackInstance, PackingMode, PreconditionError, validate_packing
from .knap2d import (
    LCParameters,
    brute_force_2dgk,
    lc_parameters,
    solve_2dgk_cardinality,
    solve_2dgk_lc,
    split_long_short,
)

SCALE = float(os.environ.get("LCPACK_TEST_SCALE", "1"))
HAS_ORTOOLS = importlib.util.find_spec("ortools") is not None


def random_knapsack(rng, N=8, n=5, unit=False):
    items = tuple(
        Item(
            f"i{k}",
            int(rng.integers(1, N, endpoint=True)),
            int(rng.integers(1, N, endpoint=True)),
            1 if unit else int(rng.integers(1, 9, endpoint=True)),
        )
        for k in range(int(rng.integers(1, n, endpoint=True)))
    )
    mode = PackingMode.CARDINALITY if unit else PackingMode.WEIGHTED
    return KnapsackInstance(N, items, mode)


def cp_sat_optimum(instance):
    from ortools.sat.python import cp_model

    model = cp_model.CpModel()
    N = instance.N
    x_intervals, y_intervals, objective = [], [], []
    for item in instance.items:
        present = model.NewBoolVar(f"p_{item.id}")
        x = model.NewIntVar(0, N - item.width, f"x_{item.id}")
        y = model.NewIntVar(0, N - item.height, f"y_{item.id}")
        x_intervals.append(model.NewOptionalFixedSizeIntervalVar(x, item.width, present, f"ix_{item.id}"))
        y_intervals.append(model.NewOptionalFixedSizeIntervalVar(y, item.height, present, f"iy_{item.id}"))
        objective.append(item.profit * present)
    model.AddNoOverlap2D(x_intervals, y_intervals)
    model.Maximize(sum(objective))
    solver = cp_model.CpSolver()
    solver.parameters.max_time_in_seconds = 10.0
    status = solver.Solve(model)
    assert status == cp_model.OPTIMAL
    return int(solver.ObjectiveValue())


class TestParameters(unittest.TestCase):
    def test_one_branch_per_long_side(self):
        instance = KnapsackInstance(10, (Item("a", 8, 2), Item("b", 3, 7), Item("c", 2, 2)))
        params = lc_parameters(instance, "1/2")
        self.assertEqual(
            params, [LCParameters(0, 10, True), LCParameters(3, 8), LCParameters(3, 7)]
        )
        self.assertEqual([p.name for p in params], ["degenerate", "lc[l=8]", "lc[l=7]"])
        self.assertEqual(lc_parameters(instance, "1/4")[1].N_prime, 1)

    def test_split(self):
        items = [Item("a", 8, 2), Item("b", 3, 7), Item("c", 2, 2)]
        long_items, short_items = split_long_short(items, 7)
        self.assertEqual([i.id for i in long_items], ["a", "b"])
        self.assertEqual([i.id for i in short_items], ["c"])


class TestBruteForce(unittest.TestCase):
    def test_small_square(self):
        instance = KnapsackInstance(
            4, (Item("a", 3, 3, 5), Item("b", 2, 2, 3), Item("c", 1, 1, 1), Item("d", 4, 1, 2))
        )
        result = brute_force_2dgk(instance)
        self.assertEqual(result.profit, 8)
        self.assertEqual(set(result.packing.item_ids), {"a", "c", "d"})
        self.assertEqual(result.flags, {"exact": True})
        self.assertTrue(validate_packing(instance, result.packing).feasible)

    def test_rotation_helps(self):
        items = (Item("a", 4, 1, 1, True), Item("b", 3, 4, 1))
        self.assertEqual(brute_force_2dgk(KnapsackInstance(4, items)).profit, 1)
        self.assertEqual(brute_force_2dgk(KnapsackInstance(4, items, rotations=True)).profit, 2)

    def test_limits(self):
        with self.assertRaises(BudgetExceededError):
            brute_force_2dgk(KnapsackInstance(10, tuple(Item(f"i{k}", 1, 1) for k in range(7))))
        with self.assertRaises(BudgetExceededError):
            brute_force_2dgk(KnapsackInstance(13, (Item("a", 1, 1),)))

    @unittest.skipUnless(HAS_ORTOOLS, "ortools is not installed")
    def test_agrees_with_cp_sat(self):
        rng = np.random.default_rng(21)
        for _ in range(int(25 * SCALE)):
            instance = random_knapsack(rng)
            self.assertEqual(brute_force_2dgk(instance).profit, cp_sat_optimum(instance), instance)


class TestLC(unittest.TestCase):
    def test_four_squares_need_two_containers(self):
        instance = KnapsackInstance(8, tuple(Item(f"s{k}", 4, 4) for k in range(4)))
        result = solve_2dgk_lc(instance, "1/4")
        self.assertEqual(result.profit, 4)
        self.assertEqual(result.branch, "degenerate")
        self.assertTrue(result.flags["heuristic_breadth"])
        self.assertFalse(result.flags["budget_exhausted"])
        self.assertEqual(result.metadata["branches"]["steinberg"], 2)
        self.assertTrue(validate_packing(instance, result.packing).feasible)

    def test_layout_budget_is_reported(self):
        instance = KnapsackInstance(8, tuple(Item(f"s{k}", 4, 4) for k in range(4)))
        result = solve_2dgk_lc(instance, "1/4", layout_budget=1)
        self.assertTrue(result.flags["budget_exhausted"])
        self.assertEqual(result.metadata["branches"]["degenerate"], 2)
        self.assertEqual((result.profit, result.branch), (4, "shelf"))
        self.assertTrue(result.flags["guaranteed"])

    def test_long_items_use_the_l(self):
        instance = KnapsackInstance(10, (Item("a", 10, 1, 4), Item("b", 1, 9, 4)))
        result = solve_2dgk_lc(instance, "1/4")
        self.assertEqual(result.profit, 8)
        self.assertTrue(validate_packing(instance, result.packing).feasible)

    def test_rotatable_long_items_fill_both_arms(self):
        items = (Item("a", 9, 1, rotatable=True), Item("b", 9, 1, rotatable=True))
        fixed = solve_2dgk_lc(KnapsackInstance(10, items), "1/4")
        self.assertEqual(fixed.metadata["branches"]["lc[l=9]"], 1)
        instance = KnapsackInstance(10, items, rotations=True)
        turning = solve_2dgk_lc(instance, "1/4")
        self.assertEqual(turning.metadata["branches"]["lc[l=9]"], 2)
        self.assertEqual(turning.profit, 2)
        self.assertTrue(validate_packing(instance, turning.packing).feasible)

    def test_eps_range(self):
        with self.assertRaises(PreconditionError):
            solve_2dgk_lc(KnapsackInstance(4, ()), 1)

    def test_micro_instances(self):
        rng = np.random.default_rng(22)
        for _ in range(int(30 * SCALE)):
            instance = random_knapsack(rng)
            result = solve_2dgk_lc(instance, "1/4")
            self.assertTrue(validate_packing(instance, result.packing).feasible)
            self.assertLessEqual(result.profit, brute_force_2dgk(instance).profit)
            self.assertGreaterEqual(result.profit, max(item.profit for item in instance.items))
            self.assertEqual(result.profit, result.packing.profit(instance.item_map))

    def test_half_of_the_optimum(self):
        rng = np.random.default_rng(24)
        for _ in range(int(60 * SCALE)):
            instance = random_knapsack(rng, N=int(rng.integers(4, 10, endpoint=True)))
            optimum = brute_force_2dgk(instance).profit
            self.assertGreaterEqual(2 * solve_2dgk_lc(instance, "1/4").profit, optimum, instance)


class TestCardinality(unittest.TestCase):
    def test_needs_unit_profits(self):
        with self.assertRaises(PreconditionError):
            solve_2dgk_cardinality(KnapsackInstance(4, (Item("a", 1, 1, 2),)), "1/4")

    def test_stacked_strips(self):
        instance = KnapsackInstance(10, tuple(Item(f"i{k}", 10, 1) for k in range(3)), PackingMode.CARDINALITY)
        result = solve_2dgk_cardinality(instance, "1/4", brute_force_items=0)
        self.assertEqual(result.profit, 3)
        self.assertEqual(result.branch, "l_full_square")
        self.assertTrue(result.flags["guaranteed"])

    def test_large_items_are_dropped(self):
        instance = KnapsackInstance(10, (Item("big", 5, 5), Item("a", 10, 1)), PackingMode.CARDINALITY)
        result = solve_2dgk_cardinality(instance, "1/4", brute_force_items=0)
        self.assertEqual(result.metadata["dropped_large"], 1)
        self.assertEqual(result.metadata["branches"]["l_full_square"], 1)
        self.assertEqual((result.profit, result.branch), (2, "shelf"))
        self.assertTrue(validate_packing(instance, result.packing).feasible)

    def test_lone_large_item_is_kept(self):
        instance = KnapsackInstance(6, (Item("a", 6, 4),), PackingMode.CARDINALITY)
        result = solve_2dgk_cardinality(instance, "1/4", brute_force_items=0)
        self.assertEqual(result.metadata["dropped_large"], 1)
        self.assertEqual((result.profit, result.branch), (1, "shelf"))

    def test_default_sends_micro_instances_to_the_oracle(self):
        one = KnapsackInstance(6, (Item("a", 6, 4),), PackingMode.CARDINALITY)
        self.assertEqual(solve_2dgk_cardinality(one, "1/4").branch, "brute_force")
        sizes = [(2, 3), (3, 2), (3, 3), (2, 5)]
        four = KnapsackInstance(
            5, tuple(Item(f"i{k}", w, h) for k, (w, h) in enumerate(sizes)), PackingMode.CARDINALITY
        )
        result = solve_2dgk_cardinality(four, "1/4")
        self.assertEqual((result.profit, result.branch), (3, "brute_force"))

    def test_tiny_instances_go_to_the_oracle(self):
        instance = KnapsackInstance(4, (Item("a", 2, 2), Item("b", 2, 2)), PackingMode.CARDINALITY)
        result = solve_2dgk_cardinality(instance, "1/4", brute_force_items=5)
        self.assertEqual(result.branch, "brute_force")
        self.assertEqual(result.profit, 2)

    def test_micro_instances(self):
        rng = np.random.default_rng(23)
        for _ in range(int(30 * SCALE)):
            instance = random_knapsack(rng, unit=True)
            result = solve_2dgk_cardinality(instance, "1/4", brute_force_items=0)
            self.assertTrue(validate_packing(instance, result.packing).feasible)
            self.assertLessEqual(result.profit, brute_force_2dgk(instance).profit)

    def test_half_of_the_optimum(self):
        rng = np.random.default_rng(25)
        for _ in range(int(60 * SCALE)):
            N = int(rng.integers(4, 10, endpoint=True))
            instance = random_knapsack(rng, N=N, n=5, unit=True)
            optimum = brute_force_2dgk(instance).profit
            self.assertEqual(solve_2dgk_cardinality(instance, "1/4").profit, optimum)
            small = instance.restrict(instance.items[:4])
            optimum = brute_force_2dgk(small).profit
            pipeline = solve_2dgk_cardinality(small, "1/4", brute_force_items=0)
            self.assertGreaterEqual(2 * pipeline.profit, optimum, small)


if __name__ == "__main__":
    unittest.main()
