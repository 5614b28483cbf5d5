# coding=utf-8
"""
Domain types, packing validation and item classification shared by every solver.

All lengths are positive integers. A packing places a subset of an instance's items
at integer bottom-left coordinates; rectangles may touch along their boundaries but
their interiors must be disjoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .config import RationalLike, parse_fraction

__all__ = [
    "PackingError",
    "InstanceError",
    "UnknownItemError",
    "PreconditionError",
    "BudgetExceededError",
    "InfeasiblePackingError",
    "Item",
    "Placement",
    "Rect",
    "Region",
    "box_region",
    "l_region",
    "region_contains",
    "region_bounds",
    "Packing",
    "PackingMode",
    "KnapsackInstance",
    "StripInstance",
    "LInstance",
    "Instance",
    "ViolationKind",
    "Violation",
    "ValidationReport",
    "validate_packing",
    "ItemClass",
    "Classification",
    "classify_items",
    "square_shrink",
    "threshold_levels",
    "intermediate_profit",
    "choose_thresholds",
    "orient_items",
    "mark_rotated",
    "lower_bound_height",
    "snap_eps",
]


class PackingError(Exception):
    """Base class for every error raised by the library."""


class InstanceError(ValueError, PackingError):
    """A malformed or semantically invalid instance."""

    def __init__(
        self,
        message: str,
        item_id: Optional[str] = None,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ):
        self.message = message
        self.item_id = item_id
        self.line = line
        self.field = field
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field:
            prefix.append(f"field '{field}'")
        if item_id is not None:
            prefix.append(f"item '{item_id}'")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)


class UnknownItemError(KeyError, PackingError):
    """A packing refers to an item id that the instance does not define."""

    def __init__(self, item_ids: Sequence[str]):
        self.item_ids = tuple(item_ids)
        super().__init__(f"Unknown item ids in packing: {', '.join(self.item_ids)}")

    def __str__(self) -> str:
        return str(self.args[0])


class PreconditionError(ValueError, PackingError):
    """An operation was called outside its documented precondition."""

    def __init__(self, message: str, item_id: Optional[str] = None):
        self.item_id = item_id
        super().__init__(message if item_id is None else f"item '{item_id}': {message}")


class BudgetExceededError(PackingError):
    """A configured time, memory or enumeration budget was hit."""

    def __init__(self, budget: str, limit: int, needed: Optional[int] = None):
        self.budget = budget
        self.limit = limit
        self.needed = needed
        detail = f" (needs {needed})" if needed is not None else ""
        super().__init__(f"Budget '{budget}' of {limit} exceeded{detail}")


class InfeasiblePackingError(PackingError):
    """Raised where only feasible packings are accepted."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(f"Packing is infeasible: {report.summary()}")


@dataclass(frozen=True)
class Item:
    id: str
    width: int
    height: int
    profit: int = 1
    rotatable: bool = False

    def __post_init__(self):
        for name in ("width", "height", "profit"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InstanceError(f"{name} must be an integer", item_id=self.id, field=name)
        if self.width < 1 or self.height < 1:
            raise InstanceError("width and height must be positive", item_id=self.id)
        if self.profit < 0:
            raise InstanceError("profit must be non-negative", item_id=self.id, field="profit")

    @property
    def area(self) -> int:
        return self.width * self.height

    def extent(self, rotated: bool = False) -> Tuple[int, int]:
        """(width, height) of the item as placed."""
        return (self.height, self.width) if rotated else (self.width, self.height)

    def turned(self) -> "Item":
        """The same item with width and height exchanged."""
        return Item(self.id, self.height, self.width, self.profit, self.rotatable)


@dataclass(frozen=True)
class Placement:
    item_id: str
    x: int
    y: int
    rotated: bool = False


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    width: int
    height: int

    @property
    def right(self) -> int:
        return self.x + self.width

    @property
    def top(self) -> int:
        return self.y + self.height

    def contains(self, other: "Rect") -> bool:
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.right <= self.right
            and other.top <= self.top
        )

    def overlaps(self, other: "Rect") -> bool:
        """True if the interiors intersect; shared boundaries do not count."""
        return (
            self.x < other.right
            and other.x < self.right
            and self.y < other.top
            and other.y < self.top
        )


# A region is the union of its boxes.
Region = Tuple[Rect, ...]


def box_region(width: int, height: int, x: int = 0, y: int = 0) -> Region:
    return (Rect(x, y, width, height),)


def l_region(N: int, w_L: int, h_L: int) -> Region:
    """The L ([0,N]×[0,h_L]) ∪ ([0,w_L]×[0,N]); empty arms are omitted."""
    boxes = []
    if h_L > 0:
        boxes.append(Rect(0, 0, N, h_L))
    if w_L > 0:
        boxes.append(Rect(0, 0, w_L, N))
    return tuple(boxes)


def region_contains(region: Region, rect: Rect) -> bool:
    """
    Whether `rect` lies inside the region.

    Checked box by box, which is exact for single rectangles and for L-regions: a
    rectangle inside an L that reaches past the vertical arm lies below h_L.
    """
    return any(box.contains(rect) for box in region)


def region_bounds(region: Region) -> Rect:
    if not region:
        return Rect(0, 0, 0, 0)
    x = min(box.x for box in region)
    y = min(box.y for box in region)
    right = max(box.right for box in region)
    top = max(box.top for box in region)
    return Rect(x, y, right - x, top - y)


@dataclass(frozen=True)
class Packing:
    placements: Tuple[Placement, ...]
    region: Region

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))
        object.__setattr__(self, "region", tuple(self.region))

    def __len__(self) -> int:
        return len(self.placements)

    @property
    def item_ids(self) -> Tuple[str, ...]:
        return tuple(p.item_id for p in self.placements)

    def rects(self, items: Mapping[str, Item]) -> Iterator[Tuple[Placement, Rect]]:
        for placement in self.placements:
            width, height = items[placement.item_id].extent(placement.rotated)
            yield placement, Rect(placement.x, placement.y, width, height)

    def profit(self, items: Union[Mapping[str, Item], Iterable[Item]]) -> int:
        lookup = items if isinstance(items, Mapping) else {i.id: i for i in items}
        return sum(lookup[p.item_id].profit for p in self.placements)

    def top(self, items: Mapping[str, Item]) -> int:
        """Highest y reached by any placed item (0 for an empty packing)."""
        return max((rect.top for _, rect in self.rects(items)), default=0)

    def extend(self, placements: Iterable[Placement]) -> "Packing":
        return Packing(self.placements + tuple(placements), self.region)

    def with_region(self, region: Region) -> "Packing":
        return Packing(self.placements, region)


class PackingMode(Enum):
    WEIGHTED = "weighted"
    CARDINALITY = "cardinality"


def _check_unique(items: Sequence[Item]) -> None:
    seen = set()
    for item in items:
        if item.id in seen:
            raise InstanceError("duplicate item id", item_id=item.id, field="id")
        seen.add(item.id)


@dataclass(frozen=True)
class KnapsackInstance:
    """Pack a maximum-profit subset of `items` into the square [0,N]×[0,N]."""

    N: int
    items: Tuple[Item, ...]
    mode: PackingMode = PackingMode.WEIGHTED
    rotations: bool = False

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", PackingMode(self.mode))
        if self.N < 1:
            raise InstanceError("knapsack side N must be positive", field="N")
        _check_unique(self.items)
        for item in self.items:
            if not any(w <= self.N and h <= self.N for w, h in self.orientations(item)):
                raise InstanceError("item does not fit in the knapsack", item_id=item.id)
            if self.mode is PackingMode.CARDINALITY and item.profit != 1:
                raise InstanceError(
                    "cardinality instances need unit profits", item_id=item.id, field="p"
                )

    def can_rotate(self, item: Item) -> bool:
        return self.rotations and item.rotatable

    def orientations(self, item: Item) -> List[Tuple[int, int]]:
        out = [item.extent(False)]
        if self.can_rotate(item) and item.width != item.height:
            out.append(item.extent(True))
        return out

    @property
    def region(self) -> Region:
        return box_region(self.N, self.N)

    @cached_property
    def item_map(self) -> Dict[str, Item]:
        return {item.id: item for item in self.items}

    @property
    def total_profit(self) -> int:
        return sum(item.profit for item in self.items)

    def restrict(self, items: Iterable[Item]) -> "KnapsackInstance":
        return KnapsackInstance(self.N, tuple(items), self.mode, self.rotations)


@dataclass(frozen=True)
class StripInstance:
    """Pack every item into the strip of width W, minimizing the height used."""

    W: int
    items: Tuple[Item, ...]
    rotations: bool = False

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.W < 1:
            raise InstanceError("strip width W must be positive", field="W")
        _check_unique(self.items)
        for item in self.items:
            if item.width > self.W and not (self.can_rotate(item) and item.height <= self.W):
                raise InstanceError("item is wider than the strip", item_id=item.id)

    def can_rotate(self, item: Item) -> bool:
        return self.rotations and item.rotatable

    def region(self, height: int) -> Region:
        return box_region(self.W, height)

    @cached_property
    def item_map(self) -> Dict[str, Item]:
        return {item.id: item for item in self.items}

    @property
    def total_area(self) -> int:
        return sum(item.area for item in self.items)


@dataclass(frozen=True)
class LInstance:
    """
    Pack long items into the boundary L of an N×N knapsack.

    Horizontal items (width > N/2) go to the bottom arm [0,N]×[0,h_L], vertical items
    (height > N/2) to the left arm [0,w_L]×[0,N].
    """

    N: int
    w_L: int
    h_L: int
    horizontal: Tuple[Item, ...] = ()
    vertical: Tuple[Item, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "horizontal", tuple(self.horizontal))
        object.__setattr__(self, "vertical", tuple(self.vertical))
        if self.N < 1:
            raise InstanceError("N must be positive", field="N")
        if not (0 <= self.w_L <= self.N and 0 <= self.h_L <= self.N):
            raise InstanceError("L arm sizes must lie in [0, N]", field="wL/hL")
        _check_unique(self.horizontal + self.vertical)
        for item in self.horizontal:
            if 2 * item.width <= self.N or item.width > self.N:
                raise InstanceError("horizontal item needs N/2 < w <= N", item_id=item.id)
        for item in self.vertical:
            if 2 * item.height <= self.N or item.height > self.N:
                raise InstanceError("vertical item needs N/2 < h <= N", item_id=item.id)

    @classmethod
    def from_items(cls, N: int, w_L: int, h_L: int, items: Iterable[Item]) -> "LInstance":
        """
        Split long items into horizontal and vertical ones.

        An item long in both directions is horizontal when w ≥ h. Items long in neither
        direction raise InstanceError.
        """
        horizontal, vertical = [], []
        for item in items:
            wide = 2 * item.width > N
            tall = 2 * item.height > N
            if wide and (not tall or item.width >= item.height):
                horizontal.append(item)
            elif tall:
                vertical.append(item)
            else:
                raise InstanceError("item is not long (no side > N/2)", item_id=item.id)
        return cls(N, w_L, h_L, tuple(horizontal), tuple(vertical))

    @property
    def items(self) -> Tuple[Item, ...]:
        return self.horizontal + self.vertical

    @property
    def region(self) -> Region:
        return l_region(self.N, self.w_L, self.h_L)

    @cached_property
    def item_map(self) -> Dict[str, Item]:
        return {item.id: item for item in self.items}

    def can_rotate(self, item: Item) -> bool:
        return False


Instance = Union[KnapsackInstance, StripInstance, LInstance]


class ViolationKind(Enum):
    OUT_OF_REGION = "out_of_region"
    DUPLICATE = "duplicate"
    OVERLAP = "overlap"
    ILLEGAL_ROTATION = "illegal_rotation"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    item_ids: Tuple[str, ...]
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def of_kind(self, kind: ViolationKind) -> List[Violation]:
        return [v for v in self.violations if v.kind is kind]

    def summary(self) -> str:
        if self.feasible:
            return "feasible"
        return "; ".join(
            f"{v.kind.value}({', '.join(v.item_ids)}){': ' + v.detail if v.detail else ''}"
            for v in self.violations
        )


def _target_region(instance: Instance, packing: Packing) -> Region:
    if isinstance(instance, StripInstance):
        height = region_bounds(packing.region).top if packing.region else 0
        return instance.region(height)
    return instance.region


def validate_packing(instance: Instance, packing: Packing) -> ValidationReport:
    """
    Check a packing against an instance.

    Strip packings are checked against [0,W]×[0,H] where H is the top of the
    packing's own region.

    Args:
        instance: the knapsack, strip or L instance
        packing: the packing to check

    Returns:
        A report listing every violation; it is empty iff the packing is feasible.

    Raises:
        UnknownItemError: if the packing names an item the instance does not have.
    """
    items = instance.item_map
    unknown = [p.item_id for p in packing.placements if p.item_id not in items]
    if unknown:
        raise UnknownItemError(unknown)

    violations: List[Violation] = []
    region = _target_region(instance, packing)

    counts: Dict[str, int] = {}
    for placement in packing.placements:
        counts[placement.item_id] = counts.get(placement.item_id, 0) + 1
    for item_id, count in counts.items():
        if count > 1:
            violations.append(
                Violation(ViolationKind.DUPLICATE, (item_id,), f"placed {count} times")
            )

    rects: List[Tuple[Rect, str]] = []
    for placement, rect in packing.rects(items):
        if placement.rotated and not instance.can_rotate(items[placement.item_id]):
            violations.append(Violation(ViolationKind.ILLEGAL_ROTATION, (placement.item_id,)))
        if not region_contains(region, rect):
            violations.append(
                Violation(
                    ViolationKind.OUT_OF_REGION,
                    (placement.item_id,),
                    f"[{rect.x},{rect.right}]x[{rect.y},{rect.top}]",
                )
            )
        rects.append((rect, placement.item_id))

    # sweep over x so that only candidates with intersecting x-ranges are compared
    rects.sort(key=lambda pair: (pair[0].x, pair[0].y, pair[1]))
    for index, (rect, item_id) in enumerate(rects):
        for other, other_id in rects[index + 1 :]:
            if other.x >= rect.right:
                break
            if rect.overlaps(other):
                x_range = (max(rect.x, other.x), min(rect.right, other.right))
                y_range = (max(rect.y, other.y), min(rect.top, other.top))
                violations.append(
                    Violation(
                        ViolationKind.OVERLAP,
                        (item_id, other_id),
                        f"x {x_range} y {y_range}",
                    )
                )
    return ValidationReport(tuple(violations))


class ItemClass(Enum):
    SMALL = "small"
    LARGE = "large"
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class Classification:
    labels: Mapping[str, ItemClass]
    eps_large: Fraction
    eps_small: Fraction

    def members(self, label: ItemClass) -> Tuple[str, ...]:
        return tuple(item_id for item_id, value in self.labels.items() if value is label)

    @property
    def skewed(self) -> Tuple[str, ...]:
        return tuple(
            item_id
            for item_id, value in self.labels.items()
            if value in (ItemClass.HORIZONTAL, ItemClass.VERTICAL)
        )


def _label(item: Item, large: Fraction, small: Fraction) -> ItemClass:
    w, h = item.width, item.height
    if w <= small and h <= small:
        return ItemClass.SMALL
    if w > large and h > large:
        return ItemClass.LARGE
    if w > large and h <= small:
        return ItemClass.HORIZONTAL
    if h > large and w <= small:
        return ItemClass.VERTICAL
    return ItemClass.INTERMEDIATE


def classify_items(
    instance: KnapsackInstance, eps_large: RationalLike, eps_small: RationalLike
) -> Classification:
    """
    Label every item small, large, horizontal, vertical or intermediate.

    Args:
        instance: the knapsack instance; thresholds are relative to its side N
        eps_large: upper threshold, 1 ≥ eps_large
        eps_small: lower threshold, 0 < eps_small < eps_large

    Returns:
        A Classification whose labels partition the items.
    """
    large = parse_fraction(eps_large)
    small = parse_fraction(eps_small)
    if not (1 >= large > small > 0):
        raise PreconditionError(f"need 1 >= eps_large > eps_small > 0, got {large}, {small}")
    labels = {
        item.id: _label(item, large * instance.N, small * instance.N)
        for item in instance.items
    }
    return Classification(labels, large, small)


def square_shrink(x: Fraction) -> Fraction:
    return x * x


def threshold_levels(
    eps: RationalLike,
    shrink: Callable[[Fraction], Fraction] = square_shrink,
    ranges: Optional[int] = None,
) -> List[Fraction]:
    """Levels ε_1 = f(ε), ε_{i+1} = f(ε_i); `ranges` + 1 values (default ceil(2/ε) ranges)."""
    value = parse_fraction(eps)
    if not (0 < value < 1):
        raise PreconditionError(f"need 0 < eps < 1, got {value}")
    if ranges is None:
        ranges = math.ceil(2 / value)
    levels = []
    for _ in range(ranges + 1):
        shrunk = Fraction(shrink(value))
        if not (0 < shrunk < value):
            raise PreconditionError(f"shrink map must satisfy 0 < f(x) < x, got f({value}) = {shrunk}")
        value = shrunk
        levels.append(value)
    return levels


def intermediate_profit(
    instance: KnapsackInstance, upper: Fraction, lower: Fraction
) -> int:
    """Profit of items with a side length in (lower·N, upper·N]."""
    hi, lo = upper * instance.N, lower * instance.N
    return sum(
        item.profit
        for item in instance.items
        if lo < item.width <= hi or lo < item.height <= hi
    )


def choose_thresholds(
    instance: KnapsackInstance,
    eps: RationalLike,
    shrink: Callable[[Fraction], Fraction] = square_shrink,
) -> Tuple[Fraction, Fraction]:
    """
    Pick (ε_large, ε_small) among consecutive shrink levels.

    Every side length falls into at most one range (ε_{j+1}N, ε_jN], so the ranges
    together carry at most twice the total profit and the cheapest of the ceil(2/ε)
    ranges carries at most ε·p(items). Ties go to the lowest level.

    Returns:
        The pair (ε_j, ε_{j+1}) of the cheapest range.
    """
    levels = threshold_levels(eps, shrink)
    best = min(
        range(len(levels) - 1),
        key=lambda j: (intermediate_profit(instance, levels[j], levels[j + 1]), j),
    )
    return levels[best], levels[best + 1]


def orient_items(
    items: Iterable[Item], width: int, allow: Callable[[Item], bool]
) -> Tuple[List[Item], FrozenSet[str]]:
    """
    Lay rotatable items flat for strip packing.

    An item is turned when rotation is allowed for it, its height exceeds its width,
    and the turned width still fits in `width`. Items wider than `width` that fit
    only when turned are turned as well.

    Returns:
        The oriented items and the ids that were turned.
    """
    oriented, turned = [], set()
    for item in items:
        if allow(item) and item.height <= width and (
            item.width > width or item.height > item.width
        ):
            oriented.append(item.turned())
            turned.add(item.id)
        else:
            oriented.append(item)
    return oriented, frozenset(turned)


def mark_rotated(packing: Packing, turned: FrozenSet[str]) -> Packing:
    """Set the rotated flag on placements of items handed to a solver turned."""
    if not turned:
        return packing
    return Packing(
        tuple(
            Placement(p.item_id, p.x, p.y, p.rotated != (p.item_id in turned))
            for p in packing.placements
        ),
        packing.region,
    )


def lower_bound_height(instance: StripInstance) -> int:
    """max(ceil(a/W), h_max), with each item in its lowest orientation that fits."""
    if not instance.items:
        return 0
    tallest = 0
    for item in instance.items:
        heights = [item.height] if item.width <= instance.W else []
        if instance.can_rotate(item) and item.height <= instance.W:
            heights.append(item.width)
        tallest = max(tallest, min(heights))
    return max(-(-instance.total_area // instance.W), tallest)


def snap_eps(eps: RationalLike) -> Fraction:
    """Round ε down to 1/ceil(1/ε)."""
    value = parse_fraction(eps)
    if not (0 < value <= 1):
        raise PreconditionError(f"need 0 < eps <= 1, got {value}")
    return Fraction(1, math.ceil(1 / value))
