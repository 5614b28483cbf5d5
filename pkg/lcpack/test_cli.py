import os
import tempfile
import unittest

import yaml

from .cli import EXIT_BUDGET, EXIT_INFEASIBLE, EXIT_OK, main
from .bench import SCHEMA_COMMENT
from .core import Item, KnapsackInstance, StripInstance
from .formats import parse_instance, serialize_instance


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.folder.cleanup()

    def path(self, name):
        return os.path.join(self.folder.name, name)

    def write(self, name, text):
        with open(self.path(name), "w", encoding="utf-8") as handle:
            handle.write(text)
        return self.path(name)

    def read(self, name):
        with open(self.path(name), encoding="utf-8") as handle:
            return handle.read()

    def test_solve_then_validate(self):
        instance = KnapsackInstance(4, (Item("a", 2, 2, 3), Item("b", 2, 4, 2), Item("c", 4, 4, 4)))
        knap = self.write("knap.yml", serialize_instance(instance))
        code = main(["solve", "--instance", knap, "--solver", "brute_force", "--out", self.path("packing.yml"), "--svg", self.path("knap.svg")])
        self.assertEqual(code, EXIT_OK)
        packing = yaml.safe_load(self.read("packing.yml"))
        self.assertEqual(packing["profit"], 5)
        self.assertEqual(packing["solver"], "brute_force")
        self.assertTrue(self.read("knap.svg").startswith("<svg"))
        code = main(["validate", "--instance", knap, "--packing", self.path("packing.yml"), "--out", self.path("report.txt")])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.read("report.txt"), "feasible\n")

    def test_default_solver_by_kind(self):
        strip = self.write("strip.yml", serialize_instance(StripInstance(10, (Item("a", 10, 1), Item("b", 10, 2)))))
        self.assertEqual(main(["solve", "--instance", strip, "--out", self.path("out.yml")]), EXIT_OK)
        packing = yaml.safe_load(self.read("out.yml"))
        self.assertEqual((packing["solver"], packing["height"]), ("strip_best", 3))

    def test_overlap_fails_validation(self):
        knap = self.write("knap.yml", "kind: knapsack\nN: 4\nitems:\n  - {id: a, w: 3, h: 3}\n  - {id: b, w: 2, h: 2}\n")
        bad = self.write("bad.yml", "placements:\n  - {id: a, x: 0, y: 0}\n  - {id: b, x: 2, y: 2}\n")
        code = main(["validate", "--instance", knap, "--packing", bad, "--out", self.path("report.txt")])
        self.assertEqual(code, EXIT_INFEASIBLE)
        self.assertIn("overlap", self.read("report.txt"))
        self.assertEqual(main(["render", "--instance", knap, "--packing", bad, "--svg", self.path("x.svg")]), EXIT_INFEASIBLE)

    def test_bad_instance(self):
        knap = self.write("knap.yml", "kind: knapsack\nN: 4\nitems:\n  - {id: a, w: 0, h: 3}\n")
        self.assertEqual(main(["solve", "--instance", knap]), EXIT_INFEASIBLE)

    def test_budget_exit_code(self):
        strip = StripInstance(10, tuple(Item(f"i{k}", 10, 1) for k in range(7)))
        path = self.write("strip.yml", serialize_instance(strip))
        code = main(["solve", "--instance", path, "--solver", "strip_brute_force", "--out", self.path("out.yml")])
        self.assertEqual(code, EXIT_BUDGET)

    def test_wrong_solver_for_the_kind(self):
        path = self.write("strip.yml", serialize_instance(StripInstance(10, (Item("a", 10, 1),))))
        self.assertEqual(main(["solve", "--instance", path, "--solver", "lc"]), EXIT_INFEASIBLE)

    def test_layout(self):
        path = self.write("strip.yml", serialize_instance(StripInstance(10, (Item("a", 10, 1), Item("b", 10, 1)))))
        fits = self.write("fits.yml", "containers:\n  - {kind: horizontal, x: 0, y: 0, w: 10, h: 2}\n")
        code = main(["solve", "--instance", path, "--layout", fits, "--out", self.path("out.yml")])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(yaml.safe_load(self.read("out.yml"))["height"], 2)
        short = self.write("short.yml", "containers:\n  - {kind: horizontal, x: 0, y: 0, w: 10, h: 1}\n")
        self.assertEqual(main(["solve", "--instance", path, "--layout", short]), EXIT_INFEASIBLE)

    def test_rotations_flag(self):
        path = self.write("strip.yml", "kind: strip\nW: 4\nitems:\n  - {id: a, w: 1, h: 4}\n  - {id: b, w: 1, h: 4}\n")
        code = main(["solve", "--instance", path, "--rotations", "--out", self.path("out.yml")])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(yaml.safe_load(self.read("out.yml"))["height"], 2)

    def test_gen_and_bench(self):
        out = self.path("gen.yml")
        self.assertEqual(main(["gen", "--generator", "uniform-strip", "--seed", "4", "--param", "n=3", "--param", "W=6", "--out", out]), EXIT_OK)
        self.assertEqual(len(parse_instance(out).items), 3)
        spec = self.write("run.yml", f"solvers: [nfdh, ffdh]\ninstances:\n  - path: {out}\n")
        self.assertEqual(main(["bench", spec, "--out", self.path("bench.csv")]), EXIT_OK)
        lines = self.read("bench.csv").splitlines()
        self.assertEqual(lines[0], SCHEMA_COMMENT)
        self.assertEqual(len(lines), 4)

    def test_bad_param(self):
        self.assertEqual(main(["gen", "--param", "n"]), EXIT_INFEASIBLE)


if __name__ == "__main__":
    unittest.main()
