# coding=utf-8
"""
Steinberg packing.

A list of rectangles fits into a w×h box whenever

    2·a(I) ≤ w·h − (2·w_max − w)₊ · (2·h_max − h)₊

with w_max ≤ w and h_max ≤ h. `steinberg_pack` builds such a packing by recursive
decomposition into sub-boxes over exact rationals. Every step checks the inequality
(or a direct fit) on each sub-box before it recurses. If no step applies, a skyline
bottom-left pass and, for short lists, an exhaustive search take over; the route
taken is recorded in the result. Coordinates are floored when the packing is
emitted. For integer item sizes inside an integer box, flooring keeps a feasible
packing feasible because floor(x + w) = floor(x) + w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .config import get_config, log
from .core import (
    BudgetExceededError,
    Item,
    Packing,
    PackingError,
    Placement,
    PreconditionError,
    box_region,
)
from .nfdh import StripResult, height_order, nfdh_strip
from .search import find_packing_by_sums

__all__ = [
    "SteinbergProblem",
    "SteinbergResult",
    "steinberg_condition",
    "steinberg_feasible",
    "steinberg_corollary_applies",
    "steinberg_pack",
    "steinberg_strip",
]

Number = Union[int, Fraction]


@dataclass(frozen=True)
class SteinbergProblem:
    width: int
    height: int
    items: Tuple[Item, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def w_max(self) -> int:
        return max((item.width for item in self.items), default=0)

    @property
    def h_max(self) -> int:
        return max((item.height for item in self.items), default=0)

    @property
    def area(self) -> int:
        return sum(item.area for item in self.items)


@dataclass(frozen=True)
class SteinbergResult:
    packing: Packing
    method: str


@dataclass(frozen=True)
class _Piece:
    id: str
    w: int
    h: int

    def turned(self) -> "_Piece":
        return _Piece(self.id, self.h, self.w)


_Layout = List[Tuple[str, Number, Number]]


def _positive(value: Number) -> Number:
    return value if value > 0 else 0


def steinberg_condition(width: Number, height: Number, sizes: Iterable[Tuple[int, int]]) -> bool:
    """The packing inequality for (w, h) pairs; no dimension checks."""
    sizes = list(sizes)
    if not sizes:
        return True
    area = sum(w * h for w, h in sizes)
    w_max = max(w for w, _ in sizes)
    h_max = max(h for _, h in sizes)
    return 2 * area <= width * height - _positive(2 * w_max - width) * _positive(
        2 * h_max - height
    )


def _check_dimensions(problem: SteinbergProblem) -> None:
    for item in problem.items:
        if item.width > problem.width or item.height > problem.height:
            raise PreconditionError(
                f"item exceeds the {problem.width}x{problem.height} box", item_id=item.id
            )


def steinberg_feasible(problem: SteinbergProblem) -> bool:
    """
    Evaluate the packing inequality for a problem.

    Raises:
        PreconditionError: an item is wider or taller than the box.
    """
    _check_dimensions(problem)
    return steinberg_condition(
        problem.width, problem.height, ((i.width, i.height) for i in problem.items)
    )


def steinberg_corollary_applies(problem: SteinbergProblem) -> bool:
    """All widths ≤ w/2 (or all heights ≤ h/2) and a ≤ w·h/2."""
    _check_dimensions(problem)
    if 2 * problem.area > problem.width * problem.height:
        return False
    return 2 * problem.w_max <= problem.width or 2 * problem.h_max <= problem.height


def _sizes(pieces: Sequence[_Piece]):
    return ((p.w, p.h) for p in pieces)


def _min_width(pieces: Sequence[_Piece], v: Number) -> Optional[Number]:
    """Smallest u with all pieces fitting a u×v box and the inequality holding."""
    a = max(p.w for p in pieces)
    b = max(p.h for p in pieces)
    if b > v:
        return None
    area = sum(p.w * p.h for p in pieces)

    def rhs(u: Number) -> Number:
        return u * v - _positive(2 * a - u) * _positive(2 * b - v)

    if rhs(a) >= 2 * area:
        return a
    if 2 * b <= v:
        return Fraction(2 * area) / v
    # on [a, 2a] the right-hand side grows with slope 2b
    u = a + Fraction(2 * area - rhs(a)) / (2 * b)
    if u <= 2 * a:
        return u
    return Fraction(2 * area) / v


class _Packer:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError("steinberg_node_budget", self.budget)

    def pack(self, pieces: Sequence[_Piece], u: Number, v: Number) -> Optional[_Layout]:
        if not pieces:
            return []
        self.tick()
        if any(p.w > u or p.h > v for p in pieces):
            return None
        if sum(p.w * p.h for p in pieces) > u * v:
            return None
        if len(pieces) == 1:
            return [(pieces[0].id, 0, 0)]
        for attempt in (self._row, self._shelves):
            layout = self._both_ways(attempt, pieces, u, v)
            if layout is not None:
                return layout
        for attempt in (self._stack, self._corner, self._split):
            layout = self._both_ways(attempt, pieces, u, v)
            if layout is not None:
                return layout
        return None

    def _both_ways(self, attempt, pieces, u, v) -> Optional[_Layout]:
        layout = attempt(pieces, u, v)
        if layout is not None:
            return layout
        turned = attempt([p.turned() for p in pieces], v, u)
        if turned is not None:
            return [(item_id, y, x) for item_id, x, y in turned]
        return None

    def _row(self, pieces, u, v) -> Optional[_Layout]:
        if sum(p.w for p in pieces) > u:
            return None
        layout, x = [], 0
        for piece in pieces:
            layout.append((piece.id, x, 0))
            x += piece.w
        return layout

    def _shelves(self, pieces, u, v) -> Optional[_Layout]:
        layout: _Layout = []
        x: Number = 0
        y: Number = 0
        shelf: Number = 0
        for piece in sorted(pieces, key=lambda p: (-p.h, -p.w, p.id)):
            if x + piece.w > u:
                y, x, shelf = y + shelf, 0, 0
            if shelf == 0:
                shelf = piece.h
                if y + shelf > v:
                    return None
            layout.append((piece.id, x, y))
            x += piece.w
        return layout

    def _place_in(self, pieces, u, v, dx, dy) -> Optional[_Layout]:
        if not pieces:
            return []
        if not steinberg_condition(u, v, _sizes(pieces)):
            return None
        layout = self.pack(pieces, u, v)
        if layout is None:
            return None
        return [(item_id, x + dx, y + dy) for item_id, x, y in layout]

    def _stack(self, pieces, u, v) -> Optional[_Layout]:
        """Stack the wide pieces (w ≥ u/2) bottom-left, the rest above or beside."""
        wide = sorted((p for p in pieces if 2 * p.w >= u), key=lambda p: (-p.w, p.id))
        if not wide or len(wide) == len(pieces):
            return None
        stack_h = sum(p.h for p in wide)
        if stack_h > v:
            return None
        base: _Layout = []
        y = 0
        for piece in wide:
            base.append((piece.id, 0, y))
            y += piece.h
        rest = [p for p in pieces if 2 * p.w < u]
        free_h = v - stack_h

        above = self._place_in(rest, u, free_h, 0, stack_h)
        if above is not None:
            return base + above

        widest = wide[0].w
        beside = self._place_in(rest, u - widest, v, widest, 0)
        if beside is not None:
            return base + beside

        # tall leftovers stand at the right edge, the others go above the stack
        tall = sorted((p for p in rest if p.h > free_h), key=lambda p: (-p.h, p.id))
        short = [p for p in rest if p.h <= free_h]
        tall_w = sum(p.w for p in tall)
        if not tall or widest + tall_w > u:
            return None
        right: _Layout = []
        x = u - tall_w
        for piece in tall:
            right.append((piece.id, x, 0))
            x += piece.w
        top = self._place_in(short, u - tall_w, free_h, 0, stack_h)
        if top is None:
            return None
        return base + right + top

    def _corner(self, pieces, u, v) -> Optional[_Layout]:
        """Put the largest wide-and-tall piece in the corner, split the rest over the two arms."""
        big = [p for p in pieces if 2 * p.w >= u and 2 * p.h >= v]
        if not big:
            return None
        anchor = max(big, key=lambda p: (p.w * p.h, p.id))
        rest = [p for p in pieces if p is not anchor]
        arms = (
            ((u - anchor.w, v, anchor.w, 0), (anchor.w, v - anchor.h, 0, anchor.h)),
            ((u, v - anchor.h, 0, anchor.h), (u - anchor.w, anchor.h, anchor.w, 0)),
        )
        for first, second in arms:
            for group_a, group_b in _bipartitions(rest):
                a = self._place_in(group_a, *first)
                if a is None:
                    continue
                b = self._place_in(group_b, *second)
                if b is not None:
                    return [(anchor.id, 0, 0)] + a + b
        return None

    def _split(self, pieces, u, v) -> Optional[_Layout]:
        """Cut the box vertically into two boxes that each satisfy the inequality."""
        for group_a, group_b in _bipartitions(pieces):
            if not group_a or not group_b:
                continue
            u1 = _min_width(group_a, v)
            u2 = _min_width(group_b, v)
            if u1 is None or u2 is None or u1 + u2 > u:
                continue
            left = self.pack(group_a, u1, v)
            if left is None:
                continue
            right = self._place_in(group_b, u - u1, v, u1, 0)
            if right is not None:
                return left + right
        return None


_ORDERS: Tuple[Callable[[_Piece], tuple], ...] = (
    lambda p: (-p.w, -p.h, p.id),
    lambda p: (-p.h, -p.w, p.id),
    lambda p: (-p.w * p.h, p.id),
)


def _bipartitions(pieces: Sequence[_Piece]):
    """Prefix splits of a few sortings; both sides may be empty."""
    seen = set()
    for key in _ORDERS:
        ordered = sorted(pieces, key=key)
        for k in range(len(ordered) + 1):
            group_a, group_b = ordered[:k], ordered[k:]
            signature = frozenset(p.id for p in group_a)
            if signature in seen:
                continue
            seen.add(signature)
            yield group_a, group_b


def _skyline(items: Sequence[Item], width: int, height: int) -> Optional[List[Placement]]:
    """Bottom-left placement at the lowest, then leftmost, free corner point."""
    for order in (
        height_order(items),
        sorted(items, key=lambda i: (-i.width, -i.height, i.id)),
        sorted(items, key=lambda i: (-i.area, i.id)),
    ):
        placed: List[Tuple[int, int, int, int]] = []
        result: List[Placement] = []
        for item in order:
            xs = sorted({0} | {x + w for x, _, w, _ in placed})
            ys = sorted({0} | {y + h for _, y, _, h in placed})
            spot = next(
                (
                    (x, y)
                    for y in ys
                    if y + item.height <= height
                    for x in xs
                    if x + item.width <= width
                    and all(
                        x >= px + pw or px >= x + item.width or y >= py + ph or py >= y + item.height
                        for px, py, pw, ph in placed
                    )
                ),
                None,
            )
            if spot is None:
                break
            placed.append((spot[0], spot[1], item.width, item.height))
            result.append(Placement(item.id, spot[0], spot[1]))
        else:
            return result
    return None


def _emit(layout: _Layout) -> Tuple[Placement, ...]:
    return tuple(Placement(item_id, math.floor(x), math.floor(y)) for item_id, x, y in layout)


def steinberg_pack(problem: SteinbergProblem) -> SteinbergResult:
    """
    Pack every item of a problem that satisfies the packing inequality.

    Args:
        problem: box and items

    Returns:
        The packing and the route that produced it (`recursive`, `skyline` or
        `exhaustive`).

    Raises:
        PreconditionError: the inequality does not hold, or an item exceeds the box.
        PackingError: every route failed.
    """
    if not steinberg_feasible(problem):
        raise PreconditionError("the Steinberg inequality does not hold for this problem")
    region = box_region(problem.width, problem.height)
    pieces = [_Piece(item.id, item.width, item.height) for item in problem.items]

    packer = _Packer(int(get_config("steinberg_node_budget", 20000)))
    try:
        layout = packer.pack(pieces, problem.width, problem.height)
    except BudgetExceededError:
        log("Steinberg recursion hit its node budget, trying fallbacks", "debug")
        layout = None
    if layout is not None:
        return SteinbergResult(Packing(_emit(layout), region), "recursive")

    placements = _skyline(problem.items, problem.width, problem.height)
    if placements is not None:
        log("Steinberg recursion found no decomposition; skyline fallback used", "debug")
        return SteinbergResult(Packing(tuple(placements), region), "skyline")

    if len(problem.items) <= int(get_config("steinberg_exhaustive_items", 7)):
        placements = find_packing_by_sums(problem.items, problem.width, problem.height)
        if placements is not None:
            log("Steinberg fallback to exhaustive search", "debug")
            return SteinbergResult(Packing(tuple(placements), region), "exhaustive")

    log(f"Steinberg construction failed for {len(problem.items)} items", "warning")
    raise PackingError("no Steinberg packing found for a problem satisfying the inequality")


def steinberg_strip(items: Sequence[Item], W: int) -> StripResult:
    """
    Strip packing by the smallest box height that satisfies the packing inequality.

    The inequality is monotone in the height and always holds at
    h_max + ceil(2a/W), so a binary search finds the first admissible height. If the
    construction fails there, the height is raised step by step; NFDH, whose height
    never exceeds the upper bound, closes the search.

    Returns:
        A StripResult whose height is the top of the tallest placed item.
    """
    for item in items:
        if item.width > W:
            raise PreconditionError(f"item is wider than the strip ({W})", item_id=item.id)
    if not items:
        return StripResult(Packing((), box_region(W, 0)), 0, "steinberg")
    sizes = [(item.width, item.height) for item in items]
    h_max = max(h for _, h in sizes)
    area = sum(w * h for w, h in sizes)
    low, high = h_max, h_max + -(-2 * area // W)
    while low < high:
        middle = (low + high) // 2
        if steinberg_condition(W, middle, sizes):
            high = middle
        else:
            low = middle + 1

    lookup = {item.id: item for item in items}
    for height in range(low, h_max + -(-2 * area // W) + 1):
        try:
            result = steinberg_pack(SteinbergProblem(W, height, tuple(items)))
        except PackingError:
            continue
        top = result.packing.top(lookup)
        return StripResult(
            result.packing.with_region(box_region(W, top)),
            top,
            "steinberg",
            {"fallback": result.method != "recursive"},
        )
    log("Steinberg strip construction failed at every height; using NFDH", "warning")
    shelf = nfdh_strip(items, W)
    return StripResult(shelf.packing, shelf.height, "steinberg", {"fallback": True})
