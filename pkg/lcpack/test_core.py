import itertools
import math
import os
import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from .core import (
    InstanceError,
    Item,
    ItemClass,
    KnapsackInstance,
    LInstance,
    Packing,
    PackingMode,
    Placement,
    PreconditionError,
    Rect,
    StripInstance,
    UnknownItemError,
    ViolationKind,
    choose_thresholds,
    classify_items,
    intermediate_profit,
    l_region,
    lower_bound_height,
    mark_rotated,
    orient_items,
    region_contains,
    snap_eps,
    threshold_levels,
    validate_packing,
)

SCALE = float(os.environ.get("LCPACK_TEST_SCALE", "1"))


class TestItems(unittest.TestCase):
    def test_zero_side_is_rejected(self):
        with self.assertRaises(InstanceError) as ctx:
            Item("a", 0, 5)
        self.assertEqual(ctx.exception.item_id, "a")

    def test_negative_profit_is_rejected(self):
        with self.assertRaises(InstanceError) as ctx:
            Item("a", 2, 2, -1)
        self.assertEqual(ctx.exception.field, "profit")

    def test_booleans_are_not_lengths(self):
        with self.assertRaises(InstanceError):
            Item("a", True, 2)

    def test_extent_and_turned(self):
        item = Item("a", 2, 5, 3, True)
        self.assertEqual(item.extent(), (2, 5))
        self.assertEqual(item.extent(True), (5, 2))
        self.assertEqual(item.turned(), Item("a", 5, 2, 3, True))
        self.assertEqual(item.area, 10)

    def test_knapsack_rejects_oversized_item(self):
        with self.assertRaises(InstanceError):
            KnapsackInstance(10, (Item("a", 11, 3),))

    def test_knapsack_rejects_duplicate_ids(self):
        with self.assertRaises(InstanceError):
            KnapsackInstance(10, (Item("a", 1, 1), Item("a", 2, 2)))

    def test_cardinality_needs_unit_profits(self):
        with self.assertRaises(InstanceError):
            KnapsackInstance(10, (Item("a", 1, 1, 2),), PackingMode.CARDINALITY)

    def test_strip_accepts_wide_item_only_when_it_may_turn(self):
        wide = Item("a", 12, 3, rotatable=True)
        StripInstance(10, (wide,), rotations=True)
        with self.assertRaises(InstanceError):
            StripInstance(10, (wide,), rotations=False)

    def test_l_instance_split(self):
        instance = LInstance.from_items(
            10, 3, 3, [Item("both", 8, 8), Item("tall", 3, 9), Item("wide", 9, 2)]
        )
        self.assertEqual([i.id for i in instance.horizontal], ["both", "wide"])
        self.assertEqual([i.id for i in instance.vertical], ["tall"])
        with self.assertRaises(InstanceError):
            LInstance.from_items(10, 3, 3, [Item("short", 3, 3)])


class TestValidation(unittest.TestCase):
    def setUp(self):
        self.instance = KnapsackInstance(
            12, (Item("a", 6, 4), Item("b", 5, 4), Item("c", 3, 3, rotatable=True))
        )

    def check(self, *placements):
        return validate_packing(self.instance, Packing(placements, self.instance.region))

    def test_overlap_is_reported_with_its_range(self):
        report = self.check(Placement("a", 0, 0), Placement("b", 5, 0))
        self.assertFalse(report.feasible)
        overlaps = report.of_kind(ViolationKind.OVERLAP)
        self.assertEqual(len(overlaps), 1)
        self.assertEqual(overlaps[0].item_ids, ("a", "b"))
        self.assertIn("x (5, 6)", overlaps[0].detail)

    def test_touching_items_are_feasible(self):
        report = self.check(Placement("a", 0, 0), Placement("b", 6, 0), Placement("c", 0, 4))
        self.assertTrue(report.feasible)
        self.assertEqual(report.summary(), "feasible")

    def test_out_of_region(self):
        report = self.check(Placement("a", 7, 0))
        self.assertEqual(len(report.of_kind(ViolationKind.OUT_OF_REGION)), 1)

    def test_duplicate(self):
        report = self.check(Placement("a", 0, 0), Placement("a", 6, 6))
        self.assertEqual(len(report.of_kind(ViolationKind.DUPLICATE)), 1)

    def test_rotation_needs_permission(self):
        report = self.check(Placement("c", 0, 0, rotated=True))
        self.assertEqual(len(report.of_kind(ViolationKind.ILLEGAL_ROTATION)), 1)
        allowed = KnapsackInstance(12, self.instance.items, rotations=True)
        packing = Packing((Placement("c", 0, 0, rotated=True),), allowed.region)
        self.assertTrue(validate_packing(allowed, packing).feasible)

    def test_unknown_item(self):
        with self.assertRaises(UnknownItemError):
            self.check(Placement("zzz", 0, 0))

    def test_strip_checked_against_packing_height(self):
        strip = StripInstance(10, (Item("a", 10, 1), Item("b", 10, 1)))
        stacked = (Placement("a", 0, 0), Placement("b", 0, 1))
        self.assertTrue(validate_packing(strip, Packing(stacked, strip.region(2))).feasible)
        self.assertFalse(validate_packing(strip, Packing(stacked, strip.region(1))).feasible)

    def test_l_region_membership(self):
        region = l_region(10, 3, 2)
        self.assertTrue(region_contains(region, Rect(0, 0, 10, 2)))
        self.assertTrue(region_contains(region, Rect(0, 0, 3, 10)))
        self.assertFalse(region_contains(region, Rect(2, 1, 2, 2)))
        self.assertEqual(len(l_region(10, 0, 2)), 1)

    @given(st.lists(st.tuples(st.integers(1, 9), st.integers(1, 9)), min_size=1, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_items_in_separate_columns_never_overlap(self, sizes):
        items = tuple(Item(f"i{k}", w, h) for k, (w, h) in enumerate(sizes))
        strip = StripInstance(10 * len(items), items)
        placements = tuple(Placement(item.id, 10 * k, 0) for k, item in enumerate(items))
        packing = Packing(placements, strip.region(9))
        self.assertTrue(validate_packing(strip, packing).feasible)

    @given(
        st.lists(
            st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(0, 8), st.integers(0, 8)),
            max_size=7,
        )
    )
    @settings(max_examples=max(1, int(2000 * SCALE)), deadline=None)
    def test_agrees_with_pairwise_check(self, boxes):
        N = 10
        instance = KnapsackInstance(N, tuple(Item(f"i{k}", w, h) for k, (w, h, _, _) in enumerate(boxes)))
        packing = Packing(
            tuple(Placement(f"i{k}", x, y) for k, (_, _, x, y) in enumerate(boxes)), instance.region
        )
        report = validate_packing(instance, packing)
        outside = sum(1 for w, h, x, y in boxes if x + w > N or y + h > N)
        overlapping = sum(
            1
            for a, b in itertools.combinations(boxes, 2)
            if a[2] < b[2] + b[0] and b[2] < a[2] + a[0] and a[3] < b[3] + b[1] and b[3] < a[3] + a[1]
        )
        self.assertEqual(len(report.of_kind(ViolationKind.OUT_OF_REGION)), outside)
        self.assertEqual(len(report.of_kind(ViolationKind.OVERLAP)), overlapping)
        self.assertEqual(report.feasible, outside == 0 and overlapping == 0)


class TestClassification(unittest.TestCase):
    def test_labels(self):
        instance = KnapsackInstance(
            100,
            (
                Item("h", 60, 5),
                Item("v", 5, 60),
                Item("s", 5, 5),
                Item("l", 60, 60),
                Item("m", 30, 30),
            ),
        )
        result = classify_items(instance, Fraction(1, 2), Fraction(1, 10))
        self.assertEqual(result.labels["h"], ItemClass.HORIZONTAL)
        self.assertEqual(result.labels["v"], ItemClass.VERTICAL)
        self.assertEqual(result.labels["s"], ItemClass.SMALL)
        self.assertEqual(result.labels["l"], ItemClass.LARGE)
        self.assertEqual(result.labels["m"], ItemClass.INTERMEDIATE)
        self.assertEqual(set(result.skewed), {"h", "v"})

    def test_thresholds_must_be_ordered(self):
        instance = KnapsackInstance(10, (Item("a", 1, 1),))
        with self.assertRaises(PreconditionError):
            classify_items(instance, "1/10", "1/2")

    def test_threshold_levels(self):
        levels = threshold_levels("1/2")
        self.assertEqual(len(levels), 5)
        self.assertEqual(levels[:2], [Fraction(1, 4), Fraction(1, 16)])
        self.assertEqual(len(threshold_levels("1/2", ranges=2)), 3)
        with self.assertRaises(PreconditionError):
            threshold_levels("1/2", shrink=lambda x: x)

    def test_cheapest_range_wins(self):
        instance = KnapsackInstance(256, (Item("a", 40, 40, 10), Item("b", 8, 8, 10)))
        self.assertEqual(intermediate_profit(instance, Fraction(1, 4), Fraction(1, 16)), 10)
        self.assertEqual(
            choose_thresholds(instance, "1/2"), (Fraction(1, 256), Fraction(1, 65536))
        )

    @given(
        st.lists(st.tuples(st.integers(1, 64), st.integers(1, 64), st.integers(0, 9)), max_size=10),
        st.sampled_from(["1/2", "1/3", "1/4"]),
    )
    @settings(max_examples=max(1, int(100 * SCALE)), deadline=None)
    def test_cheapest_range_carries_at_most_eps_of_the_profit(self, rows, eps):
        items = tuple(Item(f"i{k}", w, h, p) for k, (w, h, p) in enumerate(rows))
        instance = KnapsackInstance(64, items)
        large, small = choose_thresholds(instance, eps)
        levels = threshold_levels(eps)
        self.assertIn(large, levels)
        self.assertEqual(levels[levels.index(large) + 1], small)
        carried = intermediate_profit(instance, large, small)
        self.assertLessEqual(carried * math.ceil(2 / Fraction(eps)), 2 * instance.total_profit)
        self.assertLessEqual(carried, Fraction(eps) * instance.total_profit)
        self.assertEqual(
            carried,
            min(intermediate_profit(instance, levels[j], levels[j + 1]) for j in range(len(levels) - 1)),
        )

    @given(
        st.lists(st.tuples(st.integers(1, 40), st.integers(1, 40)), max_size=12),
        st.sampled_from([(Fraction(1, 2), Fraction(1, 10)), (Fraction(1, 4), Fraction(1, 16))]),
    )
    @settings(max_examples=max(1, int(100 * SCALE)), deadline=None)
    def test_labels_partition_the_items(self, sizes, thresholds):
        items = tuple(Item(f"i{k}", w, h) for k, (w, h) in enumerate(sizes))
        instance = KnapsackInstance(40, items)
        large, small = thresholds
        result = classify_items(instance, large, small)
        members = [set(result.members(label)) for label in ItemClass]
        self.assertEqual(sum(len(m) for m in members), len(items))
        self.assertEqual(set().union(*members), {item.id for item in items})
        hi, lo = large * 40, small * 40
        for item in items:
            label = result.labels[item.id]
            self.assertEqual(label is ItemClass.SMALL, item.width <= lo and item.height <= lo)
            self.assertEqual(label is ItemClass.LARGE, item.width > hi and item.height > hi)
            if label is ItemClass.HORIZONTAL:
                self.assertTrue(item.width > hi and item.height <= lo)
            if label is ItemClass.VERTICAL:
                self.assertTrue(item.height > hi and item.width <= lo)
            if label is ItemClass.INTERMEDIATE:
                self.assertTrue(lo < item.width <= hi or lo < item.height <= hi)


class TestStripHelpers(unittest.TestCase):
    def test_orient_items(self):
        items = [Item("a", 2, 5, rotatable=True), Item("b", 12, 3, rotatable=True), Item("c", 2, 5)]
        oriented, turned = orient_items(items, 10, lambda item: item.rotatable)
        self.assertEqual([(i.width, i.height) for i in oriented], [(5, 2), (3, 12), (2, 5)])
        self.assertEqual(turned, frozenset({"a", "b"}))

    def test_mark_rotated_flips_flags(self):
        packing = Packing((Placement("a", 0, 0), Placement("b", 1, 0, True)), ())
        marked = mark_rotated(packing, frozenset({"a", "b"}))
        self.assertEqual([p.rotated for p in marked.placements], [True, False])

    def test_lower_bound(self):
        strip = StripInstance(10, tuple(Item(f"i{k}", 10, 1) for k in range(3)))
        self.assertEqual(lower_bound_height(strip), 3)
        tall = StripInstance(10, (Item("a", 2, 7), Item("b", 1, 1)))
        self.assertEqual(lower_bound_height(tall), 7)
        turned = StripInstance(10, (Item("a", 2, 7, rotatable=True),), rotations=True)
        self.assertEqual(lower_bound_height(turned), 2)

    def test_snap_eps(self):
        self.assertEqual(snap_eps("0.3"), Fraction(1, 4))
        self.assertEqual(snap_eps("1/3"), Fraction(1, 3))
        for bad in (0, "3/2"):
            with self.assertRaises(PreconditionError):
                snap_eps(bad)


if __name__ == "__main__":
    unittest.main()
