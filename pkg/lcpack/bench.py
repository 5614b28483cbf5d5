# coding=utf-8
"""
Solver dispatch and the benchmark harness.

A run spec is a YAML mapping::

    solvers: [lc, cardinality, steinberg]
    eps: "1/4"
    budget: 500          # layouts per container search
    oracle: true         # add the exhaustive optimum where it is in reach
    instances:
      - path: examples/micro.yml
      - generator: uniform
        seeds: [1, 2, 3]
        params: {n: 4, N: 8}

Each (instance, solver) pair becomes one CSV row. Rows keep the order of the
spec even when they run in a process pool, and every column is derived from the
inputs alone unless timing is requested.
"""
from __future__ import annotations

import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Tuple

import pandas as pd

from .config import RationalLike, log, parse_fraction
from .core import (
    BudgetExceededError,
    Instance,
    InstanceError,
    KnapsackInstance,
    LInstance,
    Packing,
    PackingError,
    PreconditionError,
    StripInstance,
    lower_bound_height,
    validate_packing,
)
from .formats import instance_kind, load_document, parse_instance
from .generators import GENERATORS
from .knap2d import brute_force_2dgk, solve_2dgk_cardinality, solve_2dgk_lc
from .lpack import lpack_exact, lpack_ptas
from .nfdh import ffdh_strip, nfdh_strip
from .steinberg import steinberg_strip
from .strip import StripOptions, brute_force_strip, solve_strip_best

__all__ = [
    "SCHEMA_COMMENT",
    "COLUMNS",
    "SolveOutcome",
    "SOLVERS",
    "solver_names",
    "run_solver",
    "oracle_value",
    "BenchRow",
    "load_run_spec",
    "expand_run_spec",
    "bench",
    "bench_csv",
    "iter_failures",
]

SCHEMA_COMMENT = "# lcpack-bench schema v1"
COLUMNS = [
    "instance",
    "kind",
    "solver",
    "objective",
    "lower_bound",
    "upper_bound",
    "oracle",
    "ratio",
    "flags",
    "status",
    "error",
]


@dataclass(frozen=True)
class SolveOutcome:
    """What a solver produced: profit for knapsack and L, height for strip."""

    objective: int
    packing: Packing
    method: str
    flags: Dict[str, bool] = field(default_factory=dict)


def _knapsack(instance: Instance) -> KnapsackInstance:
    if not isinstance(instance, KnapsackInstance):
        raise PreconditionError(f"solver needs a knapsack instance, got {instance_kind(instance)}")
    return instance


def _strip(instance: Instance) -> StripInstance:
    if not isinstance(instance, StripInstance):
        raise PreconditionError(f"solver needs a strip instance, got {instance_kind(instance)}")
    return instance


def _lpack(instance: Instance) -> LInstance:
    if not isinstance(instance, LInstance):
        raise PreconditionError(f"solver needs an lpack instance, got {instance_kind(instance)}")
    return instance


def _solve_lc(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = solve_2dgk_lc(_knapsack(instance), eps, layout_budget=budget)
    return SolveOutcome(result.profit, result.packing, result.branch, result.flags)


def _solve_cardinality(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = solve_2dgk_cardinality(_knapsack(instance), eps, layout_budget=budget)
    return SolveOutcome(result.profit, result.packing, result.branch, result.flags)


def _solve_knapsack_brute_force(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = brute_force_2dgk(_knapsack(instance))
    return SolveOutcome(result.profit, result.packing, result.branch, result.flags)


def _shelf(method: Callable) -> Callable[[Instance, Fraction, Optional[int]], SolveOutcome]:
    def solve(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
        strip = _strip(instance)
        options = StripOptions(
            nfdh=method is nfdh_strip,
            ffdh=method is ffdh_strip,
            steinberg=method is steinberg_strip,
        )
        result = solve_strip_best(strip, options)
        return SolveOutcome(result.height, result.packing, result.method, result.flags)

    return solve


def _solve_strip_best(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = solve_strip_best(_strip(instance), StripOptions(eps=eps))
    return SolveOutcome(result.height, result.packing, result.method, result.flags)


def _solve_strip_containers(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    options = StripOptions(eps=eps, containers=True, probe_budget=budget or 200)
    result = solve_strip_best(_strip(instance), options)
    return SolveOutcome(result.height, result.packing, result.method, result.flags)


def _solve_strip_brute_force(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = brute_force_strip(_strip(instance))
    return SolveOutcome(result.height, result.packing, result.method, {"exact": True})


def _solve_lpack_ptas(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = lpack_ptas(_lpack(instance), eps)
    return SolveOutcome(result.profit, result.packing, "lpack_ptas")


def _solve_lpack_exact(instance: Instance, eps: Fraction, budget: Optional[int]) -> SolveOutcome:
    result = lpack_exact(_lpack(instance))
    return SolveOutcome(result.profit, result.packing, "lpack_exact", {"exact": True})


SOLVERS: Dict[str, Callable[[Instance, Fraction, Optional[int]], SolveOutcome]] = {
    "lc": _solve_lc,
    "cardinality": _solve_cardinality,
    "brute_force": _solve_knapsack_brute_force,
    "nfdh": _shelf(nfdh_strip),
    "ffdh": _shelf(ffdh_strip),
    "steinberg": _shelf(steinberg_strip),
    "strip_best": _solve_strip_best,
    "strip_containers": _solve_strip_containers,
    "strip_brute_force": _solve_strip_brute_force,
    "lpack_ptas": _solve_lpack_ptas,
    "lpack_exact": _solve_lpack_exact,
}


def solver_names() -> List[str]:
    return list(SOLVERS)


def run_solver(
    name: str, instance: Instance, eps: RationalLike = "1/4", budget: Optional[int] = None
) -> SolveOutcome:
    """
    Run the solver called `name` and check its packing.

    Raises:
        PreconditionError: unknown solver or wrong instance kind.
        PackingError: the solver returned an infeasible packing.
    """
    if name not in SOLVERS:
        raise PreconditionError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}")
    outcome = SOLVERS[name](instance, parse_fraction(eps), budget)
    report = validate_packing(instance, outcome.packing)
    if not report.feasible:
        raise PackingError(f"solver {name} returned an infeasible packing: {report.summary()}")
    return outcome


def oracle_value(instance: Instance) -> Optional[int]:
    """The exact optimum when the exhaustive oracles are within budget, else None."""
    try:
        if isinstance(instance, KnapsackInstance):
            return brute_force_2dgk(instance).profit
        if isinstance(instance, StripInstance):
            return brute_force_strip(instance).height
        return lpack_exact(instance).profit
    except BudgetExceededError as ex:
        log(f"No oracle value: {ex}", "debug")
        return None


def _bounds(instance: Instance, objective: int) -> Tuple[int, int]:
    if isinstance(instance, StripInstance):
        return lower_bound_height(instance), objective
    return objective, sum(item.profit for item in instance.items)


def _ratio(objective: int, oracle: Optional[int]) -> str:
    if oracle is None:
        return ""
    if oracle == 0:
        return "1" if objective == 0 else ""
    return str(Fraction(objective, oracle))


def _flags(flags: Mapping[str, bool]) -> str:
    return ";".join(f"{key}={int(bool(value))}" for key, value in sorted(flags.items()))


@dataclass(frozen=True)
class BenchRow:
    label: str
    solver: str
    path: Optional[str] = None
    generator: Optional[str] = None
    seed: Optional[int] = None
    params: Tuple[Tuple[str, Any], ...] = ()

    def instance(self) -> Instance:
        if self.path is not None:
            return parse_instance(self.path)
        if self.generator not in GENERATORS:
            raise InstanceError(f"unknown generator {self.generator!r}", field="generator")
        try:
            built = GENERATORS[self.generator](self.seed, **dict(self.params))
        except (TypeError, ValueError) as ex:
            raise InstanceError(
                f"bad parameters for generator {self.generator!r}: {ex}", field="params"
            ) from ex
        return built  # type: ignore[return-value]


def load_run_spec(path: str) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as handle:
        data, _ = load_document(handle.read(), path)
    if data is None:
        return {}
    if not isinstance(data, Mapping):
        raise InstanceError(f"{path}: a run spec must be a mapping", line=1)
    return dict(data)


def expand_run_spec(spec: Mapping[str, Any]) -> List[BenchRow]:
    """One BenchRow per (instance, solver), instances outermost."""
    solvers = list(spec.get("solvers") or [])
    rows = []
    for index, entry in enumerate(spec.get("instances") or []):
        if not isinstance(entry, Mapping):
            raise InstanceError(f"instance entry {index} must be a mapping", field="instances")
        if "path" in entry:
            sources = [(str(entry["path"]), dict(path=str(entry["path"])))]
        elif "generator" in entry:
            params = tuple(sorted(dict(entry.get("params") or {}).items()))
            sources = [
                (
                    f"{entry['generator']}:{seed}",
                    dict(generator=str(entry["generator"]), seed=int(seed), params=params),
                )
                for seed in entry.get("seeds") or [0]
            ]
        else:
            raise InstanceError(f"instance entry {index} needs a path or a generator", field="instances")
        for label, source in sources:
            rows.extend(BenchRow(label, solver, **source) for solver in solvers)
    return rows


def _run_row(job: Tuple[BenchRow, Fraction, Optional[int], bool, bool]) -> Dict[str, Any]:
    row, eps, budget, with_oracle, timing = job
    record: Dict[str, Any] = {column: "" for column in COLUMNS}
    record.update(instance=row.label, solver=row.solver)
    started = time.perf_counter()
    try:
        instance = row.instance()
        record["kind"] = instance_kind(instance)
        outcome = run_solver(row.solver, instance, eps, budget)
        lower, upper = _bounds(instance, outcome.objective)
        oracle = oracle_value(instance) if with_oracle else None
        record.update(
            objective=outcome.objective,
            lower_bound=lower,
            upper_bound=upper,
            oracle="" if oracle is None else oracle,
            ratio=_ratio(outcome.objective, oracle),
            flags=_flags(outcome.flags),
            status="ok",
        )
    except BudgetExceededError as ex:
        record.update(status="budget", error=str(ex))
    except PackingError as ex:
        record.update(status="error", error=str(ex))
    except Exception as ex:
        log(f"Row {row.label} / {row.solver} failed: {ex!r}", "warning")
        record.update(status="error", error=f"{type(ex).__name__}: {ex}")
    if timing:
        record["wall_ms"] = round((time.perf_counter() - started) * 1000)
    return record


def bench(
    spec: Mapping[str, Any], timing: bool = False, jobs: int = 1
) -> pd.DataFrame:
    """
    Run every row of a run spec.

    Failures are recorded in the `status` and `error` columns and the run goes on.
    The `wall_ms` column only appears with `timing`.
    """
    eps = parse_fraction(spec.get("eps", "1/4"))
    budget = spec.get("budget")
    with_oracle = bool(spec.get("oracle", False))
    rows = expand_run_spec(spec)
    jobs_list = [(row, eps, budget, with_oracle, timing) for row in rows]
    log(f"bench: {len(rows)} rows, {jobs} worker(s)", "info")
    if jobs > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_row, jobs_list))
    else:
        records = [_run_row(job) for job in jobs_list]
    columns = COLUMNS + (["wall_ms"] if timing else [])
    return pd.DataFrame(records, columns=columns)


def bench_csv(frame: pd.DataFrame) -> str:
    """The CSV text of a bench table, headed by the schema comment."""
    buffer = io.StringIO()
    buffer.write(SCHEMA_COMMENT + "\n")
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def iter_failures(frame: pd.DataFrame) -> Iterator[Tuple[str, str, str]]:
    for record in frame.itertuples(index=False):
        if record.status != "ok":
            yield record.instance, record.solver, record.error
