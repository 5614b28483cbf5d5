# coding=utf-8
"""
Two-dimensional geometric knapsack.

The L&C solver combines an L-packing of long items in a thin boundary L with a
container packing of the remaining items in the rest of the knapsack, for every
guess of the long-item threshold ℓ, and keeps the best. The cardinality solver
compares three candidates: an L over the whole square and container packings in
two slightly shrunk knapsacks. Both also try a Steinberg packing of the smallest
items. `brute_force_2dgk` is the exact oracle for tiny instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .config import RationalLike, get_config, log, parse_fraction
from .containers import search_layouts
from .core import (
    BudgetExceededError,
    Item,
    ItemClass,
    KnapsackInstance,
    LInstance,
    Packing,
    PackingError,
    Placement,
    PreconditionError,
    Rect,
    choose_thresholds,
    classify_items,
    mark_rotated,
    square_shrink,
    validate_packing,
)
from .lpack import lpack_ptas
from .nfdh import nfdh_pack_box
from .search import find_packing
from .steinberg import SteinbergProblem, steinberg_condition, steinberg_pack

__all__ = [
    "LCParameters",
    "KnapsackResult",
    "lc_parameters",
    "split_long_short",
    "solve_2dgk_lc",
    "solve_2dgk_cardinality",
    "brute_force_2dgk",
]

_PAIR_POOL = 64


@dataclass(frozen=True)
class LCParameters:
    N_prime: int
    ell: int
    degenerate: bool = False

    @property
    def name(self) -> str:
        return "degenerate" if self.degenerate else f"lc[l={self.ell}]"


@dataclass(frozen=True)
class KnapsackResult:
    packing: Packing
    profit: int
    branch: str
    flags: Dict[str, bool] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class _Candidate:
    name: str
    packing: Packing
    profit: int
    exhausted: bool = False
    containers: bool = False


def _long_side(item: Item) -> int:
    return max(item.width, item.height)


def lc_parameters(instance: KnapsackInstance, eps: RationalLike) -> List[LCParameters]:
    """The degenerate choice followed by one choice per long side > N/2, largest first."""
    epsilon = parse_fraction(eps)
    N = instance.N
    params = [LCParameters(0, N, True)]
    N_prime = min(math.ceil(epsilon * epsilon * N), N // 2)
    if N_prime <= 0:
        return params
    sides = sorted({_long_side(i) for i in instance.items if 2 * _long_side(i) > N}, reverse=True)
    params.extend(LCParameters(N_prime, ell) for ell in sides)
    return params


def split_long_short(items: Iterable[Item], ell: int) -> Tuple[List[Item], List[Item]]:
    """I_long (longer side ≥ ℓ) and I_short (the rest)."""
    long_items, short_items = [], []
    for item in items:
        (long_items if _long_side(item) >= ell else short_items).append(item)
    return long_items, short_items


def _orient(item: Item, horizontal: bool) -> Tuple[Item, bool]:
    """The item turned, if needed, so that LInstance.from_items files it as asked."""
    if item.width == item.height or (item.width > item.height) == horizontal:
        return item, False
    return item.turned(), True


def _orientation_variants(
    instance: KnapsackInstance, items: Sequence[Item]
) -> List[Tuple[List[Item], FrozenSet[str]]]:
    """As given, all horizontal, all vertical, and arms balanced by thickness."""
    fixed = [i for i in items if not instance.can_rotate(i)]
    free = [i for i in items if instance.can_rotate(i)]
    if not free:
        return [(list(items), frozenset())]

    def build(choose: Callable[[Item], bool]) -> Tuple[List[Item], FrozenSet[str]]:
        out, turned = list(fixed), set()
        for item in free:
            oriented, flipped = _orient(item, choose(item))
            out.append(oriented)
            if flipped:
                turned.add(item.id)
        return out, frozenset(turned)

    load = {True: 0, False: 0}
    for item in fixed:
        side = item.width >= item.height
        load[side] += min(item.width, item.height)
    balanced: Dict[str, bool] = {}
    for item in sorted(free, key=lambda i: (-_long_side(i), i.id)):
        side = load[True] <= load[False]
        balanced[item.id] = side
        load[side] += min(item.width, item.height)

    variants = [
        (list(items), frozenset()),
        build(lambda i: True),
        build(lambda i: False),
        build(lambda i: balanced[i.id]),
    ]
    unique, seen = [], set()
    for variant in variants:
        key = tuple(sorted((i.id, i.width, i.height) for i in variant[0]))
        if key not in seen:
            seen.add(key)
            unique.append(variant)
    return unique


def _l_candidate(
    instance: KnapsackInstance, items: Sequence[Item], arm: int, eps: Fraction, name: str
) -> _Candidate:
    """
    lpack_ptas on the L with both arms `arm` wide.

    Items too long to stand upright are turned. With rotations, rotatable items are
    also tried in the other arm and the best orientation variant is kept.
    """
    N = instance.N
    usable, forced = [], set()
    for item in items:
        if item.width > N or item.height > N:
            if not instance.can_rotate(item):
                continue
            item = item.turned()
            forced.add(item.id)
        if 2 * item.width > N or 2 * item.height > N:
            usable.append(item)
    if not usable or arm <= 0:
        return _Candidate(name, Packing((), instance.region), 0)
    best: Optional[_Candidate] = None
    for variant, turned in _orientation_variants(instance, usable):
        result = lpack_ptas(LInstance.from_items(N, arm, arm, variant), eps)
        if best is None or result.profit > best.profit:
            packing = mark_rotated(result.packing, frozenset(forced ^ turned))
            best = _Candidate(name, packing.with_region(instance.region), result.profit)
    assert best is not None
    return best


def _shelf_candidate(instance: KnapsackInstance, items: Sequence[Item], name: str = "shelf") -> _Candidate:
    """
    Greedy subsets of the whole square, each checked by NFDH.

    Items are offered by profit density, by profit, by width and by height; every
    item that still leaves an NFDH packing of the chosen set is kept. One more run
    starts from the most profitable pair that fits side by side or stacked, among
    the ``_PAIR_POOL`` most profitable items, and grows it by profit density. Any
    single item, and any pair that fits at all, passes the NFDH check.
    """
    N = instance.N
    upright, turned = [], set()
    for item in items:
        if item.width > N or item.height > N:
            if not instance.can_rotate(item):
                continue
            item = item.turned()
            turned.add(item.id)
        upright.append(item)
    density: Callable[[Item], Any] = lambda i: (-Fraction(i.profit, i.area), i.id)
    runs: List[Tuple[List[Item], Callable[[Item], Any]]] = [
        ([], density),
        ([], lambda i: (-i.profit, i.area, i.id)),
        ([], lambda i: (i.width, -i.profit, i.id)),
        ([], lambda i: (i.height, -i.profit, i.id)),
    ]
    pool = sorted(upright, key=lambda i: (-i.profit, i.id))[:_PAIR_POOL]
    pairs = [
        (a.profit + b.profit, a, b)
        for k, a in enumerate(pool)
        for b in pool[k + 1 :]
        if a.width + b.width <= N or a.height + b.height <= N
    ]
    if pairs:
        _, a, b = max(pairs, key=lambda pair: pair[0])
        runs.append(([a, b], density))
    best_packing, best_profit = Packing((), instance.region), 0
    for seed, key in runs:
        chosen = list(seed)
        packing = nfdh_pack_box(chosen, N, N)[0] if chosen else None
        taken = {i.id for i in chosen}
        for item in sorted(upright, key=key):
            if item.id in taken:
                continue
            trial, leftover = nfdh_pack_box(chosen + [item], N, N)
            if not leftover:
                chosen.append(item)
                taken.add(item.id)
                packing = trial
        profit = sum(i.profit for i in chosen)
        if packing is not None and profit > best_profit:
            best_packing, best_profit = packing, profit
    packing = mark_rotated(best_packing, frozenset(turned)).with_region(instance.region)
    return _Candidate(name, packing, best_profit)


def _container_candidate(
    instance: KnapsackInstance,
    items: Sequence[Item],
    region: Rect,
    eps: Fraction,
    K_max: Optional[int],
    budget: Optional[int],
    name: str,
) -> _Candidate:
    if not items or region.width <= 0 or region.height <= 0:
        return _Candidate(name, Packing((), instance.region), 0, containers=True)
    sub = instance.restrict(items)
    found = search_layouts(sub, region, eps, K_max=K_max, budget=budget)
    return _Candidate(name, found.packing, found.profit, found.exhausted, containers=True)


def _lc_branch(
    instance: KnapsackInstance,
    params: LCParameters,
    eps: Fraction,
    K_max: Optional[int],
    budget: Optional[int],
) -> _Candidate:
    N, N_prime = instance.N, params.N_prime
    long_items, short_items = split_long_short(instance.items, params.ell)
    boundary = _l_candidate(instance, long_items, N_prime, eps, params.name)
    residual = Rect(N_prime, N_prime, N - N_prime, N - N_prime)
    inner = _container_candidate(instance, short_items, residual, eps, K_max, budget, params.name)
    return _Candidate(
        params.name,
        boundary.packing.extend(inner.packing.placements),
        boundary.profit + inner.profit,
        inner.exhausted,
        containers=True,
    )


def _steinberg_candidate(instance: KnapsackInstance, region: Rect, name: str = "steinberg") -> _Candidate:
    """Smallest items first while the Steinberg inequality holds for `region`."""
    chosen: List[Item] = []
    for item in sorted(instance.items, key=lambda i: (i.area, -i.profit, i.id)):
        if item.profit == 0 or item.width > region.width or item.height > region.height:
            continue
        sizes = [(i.width, i.height) for i in chosen + [item]]
        if not steinberg_condition(region.width, region.height, sizes):
            break
        chosen.append(item)
    if not chosen:
        return _Candidate(name, Packing((), instance.region), 0)
    try:
        result = steinberg_pack(SteinbergProblem(region.width, region.height, tuple(chosen)))
    except PackingError as ex:
        log(f"Steinberg candidate skipped: {ex}", "info")
        return _Candidate(name, Packing((), instance.region), 0)
    placements = tuple(
        Placement(p.item_id, p.x + region.x, p.y + region.y, p.rotated) for p in result.packing.placements
    )
    return _Candidate(name, Packing(placements, instance.region), sum(i.profit for i in chosen))


def _pick(
    instance: KnapsackInstance,
    candidates: Sequence[_Candidate],
    metadata: Dict[str, Any],
) -> KnapsackResult:
    best = candidates[0]
    for candidate in candidates[1:]:
        if candidate.profit > best.profit:
            best = candidate
    report = validate_packing(instance, best.packing)
    if not report.feasible:
        raise PackingError(f"branch {best.name} produced an infeasible packing: {report.summary()}")
    flags = {
        "budget_exhausted": any(c.exhausted for c in candidates),
        "guaranteed": not best.containers,
        "heuristic_breadth": best.containers,
    }
    metadata = dict(metadata, branches={c.name: c.profit for c in candidates})
    return KnapsackResult(best.packing, best.profit, best.name, flags, metadata)


def _evaluate(name: str, build: Callable[[], _Candidate], instance: KnapsackInstance) -> _Candidate:
    try:
        return build()
    except BudgetExceededError as ex:
        log(f"Branch {name} hit a budget: {ex}", "warning")
        return _Candidate(name, Packing((), instance.region), 0, exhausted=True)


def _threshold_metadata(
    instance: KnapsackInstance, eps: Fraction, shrink: Callable[[Fraction], Fraction]
) -> Dict[str, Any]:
    eps_large, eps_small = choose_thresholds(instance, eps, shrink)
    return {
        "eps": str(eps),
        "eps_large": str(eps_large),
        "eps_small": str(eps_small),
        "shrink": getattr(shrink, "__name__", repr(shrink)),
    }


def solve_2dgk_lc(
    instance: KnapsackInstance,
    eps: RationalLike,
    layout_budget: Optional[int] = None,
    K_max: Optional[int] = None,
    shrink: Callable[[Fraction], Fraction] = square_shrink,
) -> KnapsackResult:
    """
    Best L&C packing over all guesses of the long-item threshold.

    Branches, in order: the degenerate choice (no L, containers in the whole
    knapsack), the whole square as an L for the long items, one branch per long side
    ℓ > N/2 with a boundary L of width ceil(ε²N) and containers in
    [N′, N] × [N′, N], a Steinberg packing of the smallest items, and greedy NFDH
    shelves over all items. The first branch reaching the best profit wins.

    Args:
        instance: the knapsack instance
        eps: accuracy, 0 < ε < 1
        layout_budget: layouts per container search (config `layout_budget`)
        K_max: containers per layout (config `layout_k_max`)
        shrink: map for the item classification thresholds recorded in metadata

    Returns:
        A KnapsackResult; `flags["budget_exhausted"]` marks a search cut short.
    """
    epsilon = parse_fraction(eps)
    if not 0 < epsilon < 1:
        raise PreconditionError(f"need 0 < eps < 1, got {epsilon}")
    N = instance.N
    metadata = _threshold_metadata(instance, epsilon, shrink)
    candidates: List[_Candidate] = []
    for params in lc_parameters(instance, epsilon):
        if params.degenerate:
            _, short_items = split_long_short(instance.items, params.ell)
            candidates.append(
                _evaluate(
                    params.name,
                    lambda: _container_candidate(
                        instance, short_items, Rect(0, 0, N, N), epsilon, K_max, layout_budget, "degenerate"
                    ),
                    instance,
                )
            )
            candidates.append(
                _evaluate(
                    "full_l",
                    lambda: _l_candidate(instance, instance.items, N, epsilon, "full_l"),
                    instance,
                )
            )
        else:
            candidates.append(
                _evaluate(
                    params.name,
                    lambda params=params: _lc_branch(instance, params, epsilon, K_max, layout_budget),
                    instance,
                )
            )
    candidates.append(_steinberg_candidate(instance, Rect(0, 0, N, N)))
    candidates.append(_shelf_candidate(instance, instance.items))
    metadata["N_prime"] = min(math.ceil(epsilon * epsilon * N), N // 2)
    return _pick(instance, candidates, metadata)


def solve_2dgk_cardinality(
    instance: KnapsackInstance,
    eps: RationalLike,
    layout_budget: Optional[int] = None,
    K_max: Optional[int] = None,
    brute_force_items: Optional[int] = None,
) -> KnapsackResult:
    """
    Cardinality knapsack: best of an L over the whole square and container packings
    in N × N/(1+ε) and N/(1+ε) × N.

    Instances with at most `brute_force_items` items (config
    `cardinality_brute_force_items`) and a side the oracle accepts go to the exact
    oracle. Otherwise items with both sides > εN are dropped before the three
    candidates run. A Steinberg packing and greedy NFDH shelves over all items,
    large ones included, are compared as well.

    Raises:
        PreconditionError: some item has profit other than 1.
    """
    epsilon = parse_fraction(eps)
    if not 0 < epsilon < 1:
        raise PreconditionError(f"need 0 < eps < 1, got {epsilon}")
    if any(item.profit != 1 for item in instance.items):
        raise PreconditionError("cardinality solving needs unit profits")
    threshold = (
        brute_force_items
        if brute_force_items is not None
        else int(get_config("cardinality_brute_force_items", 5))
    )
    if len(instance.items) <= threshold and instance.N <= int(get_config("brute_force_max_side", 12)):
        try:
            return brute_force_2dgk(instance)
        except BudgetExceededError as ex:
            log(f"Cardinality oracle skipped: {ex}", "info")

    N = instance.N
    labels = classify_items(instance, epsilon, epsilon / 2).labels
    kept = [item for item in instance.items if labels[item.id] is not ItemClass.LARGE]
    large = [item for item in instance.items if labels[item.id] is ItemClass.LARGE]
    reduced = math.floor(N / (1 + epsilon))
    long_items = [item for item in kept if 2 * _long_side(item) > N]
    pool = instance.restrict(kept)
    candidates = [
        _evaluate("l_full_square", lambda: _l_candidate(pool, long_items, N, epsilon, "l_full_square"), instance),
        _evaluate(
            "containers_wide",
            lambda: _container_candidate(pool, kept, Rect(0, 0, N, reduced), epsilon, K_max, layout_budget, "containers_wide"),
            instance,
        ),
        _evaluate(
            "containers_tall",
            lambda: _container_candidate(pool, kept, Rect(0, 0, reduced, N), epsilon, K_max, layout_budget, "containers_tall"),
            instance,
        ),
        _steinberg_candidate(pool, Rect(0, 0, N, N)),
        _shelf_candidate(instance, instance.items),
    ]
    metadata = {"eps": str(epsilon), "dropped_large": len(large)}
    return _pick(instance, candidates, metadata)


def brute_force_2dgk(instance: KnapsackInstance) -> KnapsackResult:
    """
    Exact optimum for tiny instances.

    Subsets are tried by non-increasing profit; a subset containing a known
    infeasible subset is skipped. Feasibility is decided by exhaustive placement
    search, with rotations where the instance allows them.

    Raises:
        BudgetExceededError: more than `brute_force_max_items` items, a side above
            `brute_force_max_side`, or a search over its node budget.
    """
    max_items = int(get_config("brute_force_max_items", 6))
    max_side = int(get_config("brute_force_max_side", 12))
    n = len(instance.items)
    if n > max_items:
        raise BudgetExceededError("brute_force_max_items", max_items, n)
    if instance.N > max_side:
        raise BudgetExceededError("brute_force_max_side", max_side, instance.N)
    items = instance.items
    masks = sorted(
        range(1 << n),
        key=lambda mask: (-sum(items[i].profit for i in range(n) if mask >> i & 1), mask),
    )
    infeasible: List[int] = []
    capacity = instance.N * instance.N
    for mask in masks:
        if any(bad & mask == bad for bad in infeasible):
            continue
        chosen = [items[i] for i in range(n) if mask >> i & 1]
        placements = None
        if sum(i.area for i in chosen) <= capacity:
            placements = find_packing(chosen, instance.N, instance.N, instance.can_rotate)
        if placements is None:
            infeasible.append(mask)
            continue
        packing = Packing(tuple(placements), instance.region)
        return KnapsackResult(packing, sum(i.profit for i in chosen), "brute_force", {"exact": True})
    raise PackingError("no feasible subset found")  # the empty set always fits
