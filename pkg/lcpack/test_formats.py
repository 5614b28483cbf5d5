import os
import tempfile
import unittest

import yaml

from .containers import Container, ContainerKind, Layout
from .core import (
    InstanceError,
    Item,
    KnapsackInstance,
    LInstance,
    PackingMode,
    Placement,
    StripInstance,
    box_region,
    validate_packing,
)
from .formats import (
    packing_to_document,
    parse_instance,
    parse_instance_text,
    parse_layout,
    parse_packing_text,
    serialize_instance,
    serialize_layout,
    serialize_packing,
)

KNAPSACK = """\
kind: knapsack
N: 10
items:
  - {id: a, w: 3, h: 4, p: 5}
  - {id: b, w: 6, h: 2, r: false}
"""


class TestInstanceDocuments(unittest.TestCase):
    def test_knapsack(self):
        instance = parse_instance_text(KNAPSACK)
        self.assertIsInstance(instance, KnapsackInstance)
        self.assertEqual(instance.N, 10)
        self.assertEqual(instance.mode, PackingMode.WEIGHTED)
        self.assertFalse(instance.rotations)
        self.assertEqual(instance.items, (Item("a", 3, 4, 5, True), Item("b", 6, 2, 1, False)))

    def test_zero_side_points_at_its_line(self):
        text = KNAPSACK.replace("w: 6", "w: 0")
        with self.assertRaises(InstanceError) as ctx:
            parse_instance_text(text)
        self.assertEqual((ctx.exception.line, ctx.exception.item_id), (5, "b"))

    def test_oversized_item_points_at_its_line(self):
        text = KNAPSACK.replace("w: 6", "w: 11")
        with self.assertRaises(InstanceError) as ctx:
            parse_instance_text(text)
        self.assertEqual((ctx.exception.line, ctx.exception.item_id), (5, "b"))
        self.assertIn("line 5", str(ctx.exception))

    def test_field_errors(self):
        cases = {
            "kind": KNAPSACK.replace("knapsack", "box"),
            "w": KNAPSACK.replace("w: 3", "w: true"),
            "N": KNAPSACK.replace("N: 10\n", ""),
            "items": KNAPSACK.replace("p: 5", "colour: red"),
            "mode": KNAPSACK + "mode: fastest\n",
        }
        for field, text in cases.items():
            with self.subTest(field=field):
                with self.assertRaises(InstanceError) as ctx:
                    parse_instance_text(text)
                self.assertEqual(ctx.exception.field, field)

    def test_malformed_yaml(self):
        with self.assertRaises(InstanceError) as ctx:
            parse_instance_text("a: b: c")
        self.assertEqual(ctx.exception.line, 1)

    def test_strip_and_lpack(self):
        strip = parse_instance_text("kind: strip\nW: 8\nrotations: true\nitems:\n  - {id: a, w: 10, h: 2}\n")
        self.assertIsInstance(strip, StripInstance)
        self.assertTrue(strip.rotations)
        lpack = parse_instance_text(
            "kind: lpack\nN: 10\nwL: 2\nhL: 3\nitems:\n  - {id: a, w: 8, h: 1}\n  - {id: b, w: 1, h: 9}\n"
        )
        self.assertIsInstance(lpack, LInstance)
        self.assertEqual(([i.id for i in lpack.horizontal], [i.id for i in lpack.vertical]), (["a"], ["b"]))

    def test_short_item_in_lpack(self):
        with self.assertRaises(InstanceError) as ctx:
            parse_instance_text("kind: lpack\nN: 10\nwL: 2\nhL: 3\nitems:\n  - {id: c, w: 3, h: 3}\n")
        self.assertEqual((ctx.exception.item_id, ctx.exception.line), ("c", 6))

    def test_lpack_does_not_rotate(self):
        with self.assertRaises(InstanceError):
            parse_instance_text("kind: lpack\nN: 10\nwL: 2\nhL: 3\nrotations: true\nitems: []\n")

    def test_documents_survive_serialization(self):
        instances = [
            KnapsackInstance(
                8, (Item("a", 2, 3), Item("b", 8, 1, rotatable=False)), PackingMode.CARDINALITY, True
            ),
            StripInstance(5, (Item("a", 5, 2, 3), Item("b", 1, 4))),
            LInstance.from_items(10, 2, 3, [Item("a", 8, 1), Item("b", 1, 9, 2)]),
        ]
        for instance in instances:
            with self.subTest(kind=type(instance).__name__):
                self.assertEqual(parse_instance_text(serialize_instance(instance)), instance)

    def test_missing_file(self):
        with self.assertRaises(InstanceError):
            parse_instance("/no/such/instance.yml")


class TestPackingDocuments(unittest.TestCase):
    def setUp(self):
        self.strip = StripInstance(10, (Item("a", 10, 1), Item("b", 5, 2)))

    def test_strip_height_from_placements(self):
        packing = parse_packing_text(
            "placements:\n  - {id: a, x: 0, y: 0}\n  - {id: b, x: 0, y: 1, rot: false}\n", self.strip
        )
        self.assertEqual(packing.placements, (Placement("a", 0, 0), Placement("b", 0, 1)))
        self.assertEqual(packing.region, box_region(10, 3))
        self.assertTrue(validate_packing(self.strip, packing).feasible)
        document = packing_to_document(self.strip, packing, {"solver": "nfdh"})
        self.assertEqual(document["height"], 3)
        self.assertEqual(document["solver"], "nfdh")
        self.assertEqual(parse_packing_text(serialize_packing(self.strip, packing), self.strip), packing)

    def test_declared_height_is_checked(self):
        packing = parse_packing_text("height: 2\nplacements:\n  - {id: b, x: 0, y: 1}\n", self.strip)
        self.assertFalse(validate_packing(self.strip, packing).feasible)

    def test_knapsack_profit_and_rotation(self):
        instance = KnapsackInstance(10, (Item("a", 3, 4, 5),), rotations=True)
        packing = parse_packing_text("placements:\n  - {id: a, x: 1, y: 2, rot: true}\n", instance)
        document = packing_to_document(instance, packing)
        self.assertEqual(document["profit"], 5)
        self.assertEqual(document["placements"], [{"id": "a", "x": 1, "y": 2, "rot": True}])

    def test_missing_coordinate(self):
        with self.assertRaises(InstanceError) as ctx:
            parse_packing_text("placements:\n  - {id: a, y: 0}\n", self.strip)
        self.assertEqual((ctx.exception.field, ctx.exception.line), ("x", 2))


class TestLayoutDocuments(unittest.TestCase):
    def test_layout_file(self):
        layout = Layout(
            (
                Container(ContainerKind.HORIZONTAL, 4, 10),
                Container(ContainerKind.AREA, 6, 10, 4, 0, "1/5"),
            ),
            box_region(10, 10),
        )
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "layout.yml")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(serialize_layout(layout))
            again = parse_layout(path, box_region(10, 10))
        self.assertEqual(again, layout)
        self.assertEqual(yaml.safe_load(serialize_layout(layout)), layout.to_document())


if __name__ == "__main__":
    unittest.main()
