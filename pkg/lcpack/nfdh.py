# coding=utf-8
"""
Shelf packing: Next-Fit-Decreasing-Height and First-Fit-Decreasing-Height.

Items are taken in non-increasing height order (ties: wider first, then id) and
placed left to right on shelves. A shelf is as tall as its first item.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .config import RationalLike, parse_fraction
from .core import Item, Packing, Placement, PreconditionError, box_region

__all__ = [
    "Shelf",
    "StripResult",
    "height_order",
    "nfdh_pack_box",
    "nfdh_strip",
    "ffdh_strip",
    "packed_area",
    "area_threshold",
]


@dataclass
class Shelf:
    y: int
    height: int
    width: int = 0
    placements: List[Placement] = field(default_factory=list)

    def fits(self, item: Item, box_w: int) -> bool:
        return self.width + item.width <= box_w

    def add(self, item: Item, x0: int = 0) -> Placement:
        placement = Placement(item.id, x0 + self.width, self.y)
        self.width += item.width
        self.placements.append(placement)
        return placement


@dataclass(frozen=True)
class StripResult:
    """A strip packing together with the height it uses."""

    packing: Packing
    height: int
    method: str
    flags: Dict[str, bool] = field(default_factory=dict)


def height_order(items: Iterable[Item]) -> List[Item]:
    return sorted(items, key=lambda item: (-item.height, -item.width, item.id))


def nfdh_pack_box(
    items: Sequence[Item],
    box_w: int,
    box_h: int,
    eps: Optional[RationalLike] = None,
    origin: Tuple[int, int] = (0, 0),
) -> Tuple[Packing, List[Item]]:
    """
    Pack items into a box with NFDH until the next shelf no longer fits.

    If every item is ε-small for the box (w ≤ ε·box_w, h ≤ ε·box_h), the packed area
    is at least min{a(items), (1−2ε)·box_w·box_h}.

    Args:
        items: the items to pack
        box_w: box width
        box_h: box height
        eps: when given, the ε-smallness precondition is enforced
        origin: bottom-left corner of the box; placements are absolute

    Returns:
        The packing (region = the box) and the items left over, in height order.

    Raises:
        PreconditionError: an item is not ε-small or does not fit the box at all.
    """
    bound = parse_fraction(eps) if eps is not None else None
    for item in items:
        if item.width > box_w or item.height > box_h:
            raise PreconditionError("item does not fit the box", item_id=item.id)
        if bound is not None and (item.width > bound * box_w or item.height > bound * box_h):
            raise PreconditionError(f"item is not {bound}-small for the box", item_id=item.id)

    x0, y0 = origin
    order = height_order(items)
    placements: List[Placement] = []
    shelf: Optional[Shelf] = None
    leftover: List[Item] = []
    for index, item in enumerate(order):
        if shelf is None or not shelf.fits(item, box_w):
            next_y = shelf.y + shelf.height if shelf else y0
            if next_y + item.height > y0 + box_h:
                leftover = order[index:]
                break
            shelf = Shelf(next_y, item.height)
        placements.append(shelf.add(item, x0))
    return Packing(tuple(placements), box_region(box_w, box_h, x0, y0)), leftover


def _check_width(items: Iterable[Item], W: int) -> None:
    for item in items:
        if item.width > W:
            raise PreconditionError(f"item is wider than the strip ({W})", item_id=item.id)


def nfdh_strip(items: Sequence[Item], W: int) -> StripResult:
    """NFDH in a strip of width W; height ≤ h_max + 2·a(items)/W."""
    _check_width(items, W)
    placements: List[Placement] = []
    shelf: Optional[Shelf] = None
    for item in height_order(items):
        if shelf is None or not shelf.fits(item, W):
            shelf = Shelf(shelf.y + shelf.height if shelf else 0, item.height)
        placements.append(shelf.add(item))
    height = shelf.y + shelf.height if shelf else 0
    return StripResult(Packing(tuple(placements), box_region(W, height)), height, "nfdh")


def ffdh_strip(items: Sequence[Item], W: int) -> StripResult:
    """Like nfdh_strip, but every item goes to the lowest shelf with room."""
    _check_width(items, W)
    placements: List[Placement] = []
    shelves: List[Shelf] = []
    for item in height_order(items):
        target = next((s for s in shelves if s.fits(item, W)), None)
        if target is None:
            top = shelves[-1].y + shelves[-1].height if shelves else 0
            target = Shelf(top, item.height)
            shelves.append(target)
        placements.append(target.add(item))
    height = shelves[-1].y + shelves[-1].height if shelves else 0
    return StripResult(Packing(tuple(placements), box_region(W, height)), height, "ffdh")


def packed_area(packing: Packing, items: Dict[str, Item]) -> int:
    return sum(items[p.item_id].area for p in packing.placements)


def area_threshold(eps: RationalLike, box_w: int, box_h: int) -> Fraction:
    """(1−2ε)·box_w·box_h, the area NFDH is guaranteed to fill."""
    return (1 - 2 * parse_fraction(eps)) * box_w * box_h
