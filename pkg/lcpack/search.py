# coding=utf-8
"""
Exhaustive placement search used by the oracles and the Steinberg fallback.

`find_packing` scans the lowest-leftmost empty cell of an occupancy grid and either
puts an item's bottom-left corner there or declares the cell waste, within a waste
budget of box area minus item area. `find_packing_by_sums` works for large boxes:
some packing, if one exists, is bottom-left stable, so every x is a sum of widths
and every y a sum of heights.
"""
from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Sequence, Set, Tuple

from .config import get_config
from .core import BudgetExceededError, Item, Placement

__all__ = ["find_packing", "find_packing_by_sums", "subset_sums"]


def _never(item: Item) -> bool:
    return False


class _Counter:
    def __init__(self, budget: int, name: str):
        self.budget = budget
        self.name = name
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(self.name, self.budget)


def find_packing(
    items: Sequence[Item],
    width: int,
    height: int,
    allow_rotation: Callable[[Item], bool] = _never,
    node_budget: Optional[int] = None,
) -> Optional[List[Placement]]:
    """
    Decide whether all `items` fit into a width×height box.

    Args:
        items: items to place, all of them
        width: box width
        height: box height
        allow_rotation: whether an item may be turned
        node_budget: search nodes before giving up (config `brute_force_node_budget`)

    Returns:
        Placements for every item, or None if no packing exists.

    Raises:
        BudgetExceededError: the search visited more nodes than allowed.
    """
    if not items:
        return []
    if width <= 0 or height <= 0:
        return None
    waste_budget = width * height - sum(item.area for item in items)
    if waste_budget < 0:
        return None
    shapes: List[List[Tuple[int, int, bool]]] = []
    for item in items:
        options = [(item.width, item.height, False)]
        if allow_rotation(item) and item.width != item.height:
            options.append((item.height, item.width, True))
        options = [o for o in options if o[0] <= width and o[1] <= height]
        if not options:
            return None
        shapes.append(options)

    order = sorted(range(len(items)), key=lambda i: (-items[i].area, items[i].id))
    full = (1 << width) - 1
    rows = [0] * height
    placed: List[Optional[Placement]] = [None] * len(items)
    remaining = list(order)
    counter = _Counter(
        node_budget or int(get_config("brute_force_node_budget", 2000000)),
        "brute_force_node_budget",
    )

    def min_side() -> int:
        return min(min(o[0] for o in shapes[i]) for i in remaining)

    def solve(y: int, waste: int) -> bool:
        counter.tick()
        if not remaining:
            return True
        while y < height and rows[y] == full:
            y += 1
        if y == height:
            return False
        free = ~rows[y] & full
        x = (free & -free).bit_length() - 1
        run = 0
        while x + run < width and not rows[y] >> (x + run) & 1:
            run += 1
        if run < min_side():
            if waste + run > waste_budget:
                return False
            rows[y] |= ((1 << run) - 1) << x
            if solve(y, waste + run):
                return True
            rows[y] &= ~(((1 << run) - 1) << x)
            return False

        tried: Set[Tuple[int, int, bool]] = set()
        for position, index in enumerate(list(remaining)):
            item = items[index]
            for w, h, rotated in shapes[index]:
                key = (w, h, allow_rotation(item))
                if key in tried or w > run or y + h > height:
                    continue
                mask = ((1 << w) - 1) << x
                if any(rows[y + dy] & mask for dy in range(h)):
                    continue
                tried.add(key)
                for dy in range(h):
                    rows[y + dy] |= mask
                remaining.pop(position)
                placed[index] = Placement(item.id, x, y, rotated)
                if solve(y, waste):
                    return True
                placed[index] = None
                remaining.insert(position, index)
                for dy in range(h):
                    rows[y + dy] &= ~mask
        if waste < waste_budget:
            rows[y] |= 1 << x
            if solve(y, waste + 1):
                return True
            rows[y] &= ~(1 << x)
        return False

    if solve(0, 0):
        return [p for p in placed if p is not None]
    return None


def subset_sums(values: Iterable[int], limit: int) -> List[int]:
    """All sums of sub-multisets of `values` that do not exceed `limit`, sorted."""
    sums = {0}
    for value in values:
        sums |= {s + value for s in sums if s + value <= limit}
    return sorted(sums)


def find_packing_by_sums(
    items: Sequence[Item],
    width: int,
    height: int,
    node_budget: Optional[int] = None,
) -> Optional[List[Placement]]:
    """
    Complete search for large boxes without rotations.

    Each item, largest first, tries every free position (x, y) with x a sum of other
    items' widths and y a sum of other items' heights, lowest first.

    Raises:
        BudgetExceededError: more than `node_budget` positions were tried.
    """
    if not items:
        return []
    if sum(item.area for item in items) > width * height:
        return None
    order = sorted(items, key=lambda item: (-item.area, -item.height, item.id))
    counter = _Counter(
        node_budget or int(get_config("brute_force_node_budget", 2000000)),
        "brute_force_node_budget",
    )
    xs = subset_sums((item.width for item in items), width)
    ys = subset_sums((item.height for item in items), height)
    placed: List[Tuple[int, int, int, int]] = []
    result: List[Placement] = []

    def free(x: int, y: int, w: int, h: int) -> bool:
        return all(
            x >= px + pw or px >= x + w or y >= py + ph or py >= y + h
            for px, py, pw, ph in placed
        )

    def solve(index: int) -> bool:
        if index == len(order):
            return True
        item = order[index]
        for y in ys:
            if y + item.height > height:
                break
            for x in xs:
                if x + item.width > width:
                    break
                counter.tick()
                if not free(x, y, item.width, item.height):
                    continue
                placed.append((x, y, item.width, item.height))
                result.append(Placement(item.id, x, y))
                if solve(index + 1):
                    return True
                placed.pop()
                result.pop()
        return False

    return list(result) if solve(0) else None
