# coding=utf-8
"""
Command line front end.

    lcpack solve --instance knap.yml --solver lc --eps 1/4 --svg knap.svg
    lcpack validate --instance knap.yml --packing packing.yml
    lcpack render --instance knap.yml --packing packing.yml --svg knap.svg
    lcpack bench run.yml --out results.csv
    lcpack gen --generator uniform --seed 3 --param n=5 --param N=10

Exit codes: 0 on success, 2 for an infeasible packing, a failed validation or a
bad instance, 3 when a budget ran out.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from .bench import bench, bench_csv, iter_failures, load_run_spec, run_solver, solver_names
from .config import log, parse_fraction
from .containers import Layout, solve_for_layout
from .core import (
    BudgetExceededError,
    Instance,
    InfeasiblePackingError,
    InstanceError,
    KnapsackInstance,
    LInstance,
    Packing,
    PackingError,
    PreconditionError,
    StripInstance,
    UnknownItemError,
    box_region,
    validate_packing,
)
from .formats import load_document, parse_instance, parse_packing, serialize_instance, serialize_packing
from .generators import GENERATORS
from .render import save_svg
from .strip import solve_strip_container

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INFEASIBLE", "EXIT_BUDGET"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3

_DEFAULT_SOLVER = {KnapsackInstance: "lc", StripInstance: "strip_best", LInstance: "lpack_ptas"}


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str, rotations: bool = False) -> Instance:
    instance = parse_instance(path)
    if rotations:
        if isinstance(instance, LInstance):
            raise InstanceError("lpack instances do not rotate", field="rotations")
        instance = dataclasses.replace(instance, rotations=True)
    return instance


def _load_layout(path: str, instance: Instance) -> Layout:
    with open(path, encoding="utf-8") as handle:
        data, _ = load_document(handle.read(), path)
    if isinstance(instance, StripInstance):
        draft = Layout.from_document(data, box_region(instance.W, 0))
        height = max((c.y + c.height for c in draft.containers), default=0)
        return Layout(draft.containers, box_region(instance.W, height))
    return Layout.from_document(data, instance.region)


def _solve_with_layout(instance: Instance, layout: Layout, eps: str) -> Packing:
    if isinstance(instance, KnapsackInstance):
        return solve_for_layout(instance, layout, eps)
    if isinstance(instance, StripInstance):
        result = solve_strip_container(instance, layout, eps)
        if result is None:
            raise PreconditionError("the layout cannot take every item")
        return result.packing
    raise PreconditionError("layouts apply to knapsack and strip instances")


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance, args.rotations)
    extra: Dict[str, Any] = {}
    if args.layout:
        packing = _solve_with_layout(instance, _load_layout(args.layout, instance), args.eps)
        extra["solver"] = "layout"
    else:
        solver = args.solver or _DEFAULT_SOLVER[type(instance)]
        outcome = run_solver(solver, instance, args.eps, args.budget)
        packing = outcome.packing
        extra.update(solver=solver, method=outcome.method)
        if outcome.flags:
            extra["flags"] = {key: bool(value) for key, value in sorted(outcome.flags.items())}
    report = validate_packing(instance, packing)
    if not report.feasible:
        raise InfeasiblePackingError(report)
    _write(serialize_packing(instance, packing, extra), args.out)
    if args.svg:
        save_svg(args.svg, instance, packing)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    packing = parse_packing(args.packing, instance)
    report = validate_packing(instance, packing)
    _write(report.summary() + "\n", args.out)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_render(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    packing = parse_packing(args.packing, instance)
    save_svg(args.svg, instance, packing)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    spec = load_run_spec(args.spec)
    if args.budget is not None:
        spec["budget"] = args.budget
    if args.eps is not None:
        spec["eps"] = args.eps
    frame = bench(spec, timing=args.timing, jobs=args.jobs)
    for label, solver, error in iter_failures(frame):
        log(f"bench row {label} / {solver} failed: {error}", "warning")
    _write(bench_csv(frame), args.out)
    return EXIT_OK


def _params(pairs: Sequence[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise InstanceError(f"expected key=value, got {pair!r}", field="param")
        if value.lower() in ("true", "false"):
            params[key] = value.lower() == "true"
        else:
            try:
                params[key] = int(value)
            except ValueError:
                params[key] = str(parse_fraction(value))
    return params


def cmd_gen(args: argparse.Namespace) -> int:
    instance = GENERATORS[args.generator](args.seed, **_params(args.param))
    _write(serialize_instance(instance), args.out)  # type: ignore[arg-type]
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcpack", description="Rectangle packing: knapsack, strip and L-packing solvers."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug output")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", help="Solve an instance")
    solve.add_argument("--instance", required=True, help="Instance document")
    solve.add_argument("--solver", choices=solver_names(), help="Solver (default depends on the kind)")
    solve.add_argument("--eps", default="1/4", help="Accuracy, a rational such as 1/4")
    solve.add_argument("--rotations", action="store_true", help="Allow 90 degree rotations")
    solve.add_argument("--layout", help="Pack into this container layout instead")
    solve.add_argument("--budget", type=int, help="Layouts per container search")
    solve.add_argument("--out", help="Write the packing here instead of stdout")
    solve.add_argument("--svg", help="Also render the packing to this SVG file")
    solve.set_defaults(handler=cmd_solve)

    validate = subparsers.add_parser("validate", help="Check a packing against an instance")
    validate.add_argument("--instance", required=True)
    validate.add_argument("--packing", required=True)
    validate.add_argument("--out")
    validate.set_defaults(handler=cmd_validate)

    render = subparsers.add_parser("render", help="Draw a packing as SVG")
    render.add_argument("--instance", required=True)
    render.add_argument("--packing", required=True)
    render.add_argument("--svg", required=True)
    render.set_defaults(handler=cmd_render)

    bench_parser = subparsers.add_parser("bench", help="Run a benchmark spec and write CSV")
    bench_parser.add_argument("spec", help="Run spec document")
    bench_parser.add_argument("--out")
    bench_parser.add_argument("--eps")
    bench_parser.add_argument("--budget", type=int)
    bench_parser.add_argument("--timing", action="store_true", help="Add a wall_ms column")
    bench_parser.add_argument("--jobs", type=int, default=1, help="Worker processes")
    bench_parser.set_defaults(handler=cmd_bench)

    gen = subparsers.add_parser("gen", help="Write a random instance")
    gen.add_argument("--generator", choices=sorted(GENERATORS), default="uniform")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--param", action="append", default=[], help="Generator argument key=value")
    gen.add_argument("--out")
    gen.set_defaults(handler=cmd_gen)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except BudgetExceededError as ex:
        print(f"budget exhausted: {ex}", file=sys.stderr)
        return EXIT_BUDGET
    except (InfeasiblePackingError, InstanceError, PreconditionError, UnknownItemError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PackingError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
