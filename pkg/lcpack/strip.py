# coding=utf-8
"""
Strip packing: shelf baselines, the Steinberg wrapper, packing into a fixed
container layout, and an exhaustive oracle for tiny instances.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .config import RationalLike, get_config, log, parse_fraction
from .containers import (
    Container,
    ContainerKind,
    Layout,
    enumerate_layouts,
    expand_candidate_set,
    item_sizes,
    layout_gap,
    realize_assignment,
)
from .core import (
    BudgetExceededError,
    Item,
    Packing,
    PreconditionError,
    Rect,
    StripInstance,
    box_region,
    lower_bound_height,
    mark_rotated,
    orient_items,
    region_bounds,
)
from .gap import GapInstance, gap_exact_dp
from .nfdh import StripResult, ffdh_strip, nfdh_strip
from .search import find_packing
from .steinberg import steinberg_strip

__all__ = [
    "StripOptions",
    "solve_strip_container",
    "probe_containers",
    "solve_strip_best",
    "brute_force_strip",
]


@dataclass(frozen=True)
class StripOptions:
    """
    Members of the strip portfolio.

    `layouts` are tried as given, each at its own height. With `containers` set, the
    height is also binary-searched using maximal layouts of at most `probe_k_max`
    containers, `probe_budget` layouts per probed height.
    """

    nfdh: bool = True
    ffdh: bool = True
    steinberg: bool = True
    containers: bool = False
    layouts: Tuple[Layout, ...] = ()
    eps: Fraction = Fraction(1, 4)
    probe_k_max: int = 2
    probe_budget: int = 200
    jobs: int = 1


def _stretch(container: Container, factor: Fraction) -> Container:
    """Scale a container's y-extent; floors keep heights ≥ the original ones."""
    y = math.floor(container.y * factor)
    top = math.floor((container.y + container.height) * factor)
    return Container(container.kind, container.width, top - y, container.x, y, container.eps)


def solve_strip_container(
    instance: StripInstance, layout: Layout, eps: RationalLike
) -> Optional[StripResult]:
    """
    Pack every item into a fixed container layout.

    The exact GAP with unit profits decides whether all items can be assigned. The
    layout is then stretched vertically by (1+2ε) so that each area container gains
    the room NFDH needs, and the assignment is realized.

    Args:
        instance: the strip instance
        layout: containers inside [0,W]×[0,H]
        eps: area container granularity

    Returns:
        The packing, or None when this layout cannot take every item.

    Raises:
        PreconditionError: the layout is invalid or wider than the strip.
        BudgetExceededError: the GAP table outgrew `gap_table_budget`.
    """
    epsilon = parse_fraction(eps)
    layout.check()
    if region_bounds(layout.region).right > instance.W:
        raise PreconditionError(f"layout is wider than the strip ({instance.W})")
    if not instance.items:
        return StripResult(Packing((), instance.region(0)), 0, "containers")
    if not layout.containers:
        return None
    weighted, turned = layout_gap(instance, layout.containers)
    gap = GapInstance.uniform(
        weighted.capacities, weighted.sizes, [1] * len(instance.items)
    )
    assignment = gap_exact_dp(gap)
    if assignment.profit < len(instance.items):
        return None
    has_area = any(c.kind is ContainerKind.AREA for c in layout.containers)
    factor = 1 + 2 * epsilon if has_area else Fraction(1)
    stretched = [_stretch(c, factor) for c in layout.containers]
    placements = realize_assignment(instance, stretched, assignment, turned)
    if len(placements) < len(instance.items):
        log("An area container could not take all of its items after stretching", "debug")
        return None
    packing = Packing(tuple(placements), instance.region(0))
    height = packing.top(instance.item_map)
    return StripResult(packing.with_region(instance.region(height)), height, "containers")


def _layout_height(layout: Layout) -> int:
    return region_bounds(layout.region).top


def probe_containers(
    instance: StripInstance, options: StripOptions, upper: int
) -> Optional[StripResult]:
    """
    Binary-search the smallest height below `upper` at which some probed layout packs
    every item.

    Probing is a heuristic: a layout search cut short by `probe_budget` counts as a
    failure at that height.
    """
    low = lower_bound_height(instance)
    widths, heights = item_sizes(instance.items, instance.rotations)
    best: Optional[StripResult] = None

    def attempt(height: int) -> Optional[StripResult]:
        sizes = expand_candidate_set(
            set(widths) | set(heights), 1, len(instance.items), max(instance.W, height)
        )
        layouts = enumerate_layouts(
            None,
            options.probe_k_max,
            sizes,
            Rect(0, 0, instance.W, height),
            options.eps,
            budget=options.probe_budget,
        )
        try:
            for layout in layouts:
                try:
                    found = solve_strip_container(instance, layout, options.eps)
                except BudgetExceededError:
                    continue
                if found is not None:
                    return found
        except BudgetExceededError:
            log(f"Container probe at height {height} ran out of layouts", "debug")
        return None

    high = upper - 1
    while low <= high:
        middle = (low + high) // 2
        found = attempt(middle)
        if found is None:
            low = middle + 1
        else:
            best = found
            high = middle - 1
    return best


def _members(
    instance: StripInstance, items: Sequence[Item], options: StripOptions
) -> List[Tuple[str, Callable[[], StripResult]]]:
    members: List[Tuple[str, Callable[[], StripResult]]] = []
    if options.nfdh:
        members.append(("nfdh", lambda: nfdh_strip(items, instance.W)))
    if options.ffdh:
        members.append(("ffdh", lambda: ffdh_strip(items, instance.W)))
    if options.steinberg:
        members.append(("steinberg", lambda: steinberg_strip(items, instance.W)))
    return members


def solve_strip_best(
    instance: StripInstance, options: Optional[StripOptions] = None
) -> StripResult:
    """
    Lowest packing over the enabled portfolio members.

    With rotations, rotatable items are laid flat first. Shelf and Steinberg members
    may run in a thread pool (`options.jobs`); ties go to the earlier member in the
    order nfdh, ffdh, steinberg, explicit layouts, container probing.

    Returns:
        The best StripResult; `flags` records which members ran.
    """
    options = options or StripOptions()
    if instance.rotations:
        items, turned = orient_items(instance.items, instance.W, instance.can_rotate)
    else:
        items, turned = list(instance.items), frozenset()
    if not items:
        return StripResult(Packing((), instance.region(0)), 0, "empty")

    members = _members(instance, items, options)
    if options.jobs > 1 and len(members) > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            results = list(pool.map(lambda member: member[1](), members))
    else:
        results = [build() for _, build in members]

    oriented = StripInstance(instance.W, tuple(items), rotations=False)
    for layout in options.layouts:
        try:
            found = solve_strip_container(oriented, layout, options.eps)
        except BudgetExceededError as ex:
            log(f"Explicit layout skipped: {ex}", "warning")
            continue
        if found is None:
            log(f"Layout of height {_layout_height(layout)} cannot take every item", "info")
        else:
            results.append(found)

    if options.containers:
        upper = min((r.height for r in results), default=lower_bound_height(oriented) * 3 + 1)
        probed = probe_containers(oriented, options, upper)
        if probed is not None:
            results.append(probed)

    if not results:
        raise PreconditionError("no strip packing member is enabled")
    best = results[0]
    for result in results[1:]:
        if result.height < best.height:
            best = result
    flags = dict(best.flags)
    flags.update({f"ran_{name}": True for name, _ in members})
    log(f"strip portfolio: {best.method} wins with height {best.height}", "debug")
    return StripResult(
        mark_rotated(best.packing, turned).with_region(instance.region(best.height)),
        best.height,
        best.method,
        flags,
    )


def brute_force_strip(instance: StripInstance) -> StripResult:
    """
    Exact minimum height for tiny instances: binary search on H with exhaustive
    placement, rotations included where allowed.

    Raises:
        BudgetExceededError: more than `brute_force_max_items` items, W or an item
            side above `brute_force_max_side`, or a search over its node budget.
    """
    max_items = int(get_config("brute_force_max_items", 6))
    max_side = int(get_config("brute_force_max_side", 12))
    n = len(instance.items)
    if n > max_items:
        raise BudgetExceededError("brute_force_max_items", max_items, n)
    tallest = max((max(i.width, i.height) for i in instance.items), default=0)
    if instance.W > max_side or tallest > max_side:
        raise BudgetExceededError("brute_force_max_side", max_side, max(instance.W, tallest))
    if not instance.items:
        return StripResult(Packing((), box_region(instance.W, 0)), 0, "brute_force")

    oriented, turned = orient_items(instance.items, instance.W, instance.can_rotate)
    upper = nfdh_strip(oriented, instance.W)
    best = mark_rotated(upper.packing, turned)
    low, high = lower_bound_height(instance), upper.height - 1
    while low <= high:
        middle = (low + high) // 2
        placements = find_packing(instance.items, instance.W, middle, instance.can_rotate)
        if placements is None:
            low = middle + 1
        else:
            best = Packing(tuple(placements), box_region(instance.W, middle))
            high = middle - 1
    height = best.top(instance.item_map)
    return StripResult(best.with_region(box_region(instance.W, height)), height, "brute_force")
