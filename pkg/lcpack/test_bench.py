import os
import tempfile
import unittest

from .bench import (
    COLUMNS,
    SCHEMA_COMMENT,
    bench,
    bench_csv,
    expand_run_spec,
    iter_failures,
    load_run_spec,
    oracle_value,
    run_solver,
    solver_names,
)
from .core import InstanceError, Item, PreconditionError, StripInstance
from .formats import serialize_instance


def bars(count, W=10):
    return StripInstance(W, tuple(Item(f"i{k}", W, 1) for k in range(count)))


class TestSolvers(unittest.TestCase):
    def test_names(self):
        self.assertIn("lc", solver_names())
        self.assertIn("strip_best", solver_names())

    def test_unknown_solver(self):
        with self.assertRaises(PreconditionError):
            run_solver("simplex", bars(1))

    def test_wrong_kind(self):
        with self.assertRaises(PreconditionError):
            run_solver("lc", bars(1))

    def test_shelf_member_alone(self):
        outcome = run_solver("ffdh", bars(3))
        self.assertEqual((outcome.objective, outcome.method), (3, "ffdh"))

    def test_oracle(self):
        self.assertEqual(oracle_value(bars(3)), 3)
        self.assertIsNone(oracle_value(bars(7)))


class TestBench(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.folder.name, "bars.yml")
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write(serialize_instance(bars(3)))
        self.big = os.path.join(self.folder.name, "many.yml")
        with open(self.big, "w", encoding="utf-8") as handle:
            handle.write(serialize_instance(bars(7)))

    def tearDown(self):
        self.folder.cleanup()

    def test_empty_spec_gives_the_header(self):
        text = bench_csv(bench({}))
        self.assertEqual(text, SCHEMA_COMMENT + "\n" + ",".join(COLUMNS) + "\n")

    def test_rows_and_ratio(self):
        spec = {"solvers": ["nfdh", "strip_brute_force"], "oracle": True, "instances": [{"path": self.path}]}
        frame = bench(spec)
        self.assertEqual(list(frame["solver"]), ["nfdh", "strip_brute_force"])
        first = frame.iloc[0]
        self.assertEqual(first["kind"], "strip")
        self.assertEqual(first["objective"], 3)
        self.assertEqual(first["lower_bound"], 3)
        self.assertEqual(first["oracle"], 3)
        self.assertEqual(first["ratio"], "1")
        self.assertEqual(first["flags"], "ran_nfdh=1")
        self.assertEqual(first["status"], "ok")
        self.assertEqual(frame.iloc[1]["flags"], "exact=1")

    def test_failures_are_recorded(self):
        spec = {
            "solvers": ["lc", "strip_brute_force"],
            "instances": [{"path": self.path}, {"path": self.big}],
        }
        frame = bench(spec)
        self.assertEqual(list(frame["status"]), ["error", "ok", "error", "budget"])
        failures = list(iter_failures(frame))
        self.assertEqual([(label, solver) for label, solver, _ in failures][-1], (self.big, "strip_brute_force"))
        self.assertIn("knapsack", failures[0][2])

    def test_generated_rows_are_deterministic(self):
        spec = {
            "solvers": ["nfdh", "ffdh"],
            "instances": [{"generator": "uniform-strip", "seeds": [1, 2], "params": {"n": 4, "W": 6}}],
        }
        rows = expand_run_spec(spec)
        self.assertEqual([row.label for row in rows], ["uniform-strip:1"] * 2 + ["uniform-strip:2"] * 2)
        self.assertEqual(bench_csv(bench(spec)), bench_csv(bench(spec)))
        self.assertEqual(bench_csv(bench(spec, jobs=2)), bench_csv(bench(spec)))

    def test_timing_column(self):
        frame = bench({"solvers": ["nfdh"], "instances": [{"path": self.path}]}, timing=True)
        self.assertEqual(list(frame.columns), COLUMNS + ["wall_ms"])

    def test_bad_entries(self):
        with self.assertRaises(InstanceError):
            expand_run_spec({"solvers": ["nfdh"], "instances": [{"seeds": [1]}]})
        frame = bench({"solvers": ["nfdh"], "instances": [{"generator": "nope"}]})
        self.assertEqual(frame.iloc[0]["status"], "error")

    def test_bad_generator_parameters_do_not_stop_the_run(self):
        spec = {
            "solvers": ["nfdh"],
            "instances": [
                {"generator": "uniform-strip", "params": {"n": 3, "W": 6, "bogus": 1}},
                {"generator": "uniform-strip", "params": {"n": 3, "W": 6}},
            ],
        }
        frame = bench(spec)
        self.assertEqual(list(frame["status"]), ["error", "ok"])
        self.assertIn("bogus", frame.iloc[0]["error"])
        self.assertIn("params", frame.iloc[0]["error"])

    def test_load_run_spec(self):
        path = os.path.join(self.folder.name, "run.yml")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"solvers: [nfdh]\ninstances:\n  - path: {self.path}\n")
        spec = load_run_spec(path)
        self.assertEqual(spec["solvers"], ["nfdh"])
        self.assertEqual(len(expand_run_spec(spec)), 1)


if __name__ == "__main__":
    unittest.main()
