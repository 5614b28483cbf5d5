# coding=utf-8
"""
Container packings.

A container is a box packed by a fixed rule: a horizontal container stacks items
bottom to top, a vertical one places them side by side, and an area container
holds items that are ε-small for it and packs them with NFDH. Given a layout of a
few containers, the best assignment of items to containers is a generalized
assignment problem with one bin per container.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .config import RationalLike, get_config, log, parse_fraction
from .core import (
    BudgetExceededError,
    Instance,
    InstanceError,
    Item,
    KnapsackInstance,
    Packing,
    Placement,
    PreconditionError,
    Rect,
    Region,
    box_region,
    region_contains,
    snap_eps,
)
from .gap import Assignment, GapInstance, gap_exact_dp, gap_ptas
from .nfdh import nfdh_pack_box

__all__ = [
    "ContainerKind",
    "Container",
    "Layout",
    "CandidateSizeSet",
    "expand_candidate_set",
    "candidate_bound",
    "item_sizes",
    "pack_area_container",
    "round_container",
    "layout_gap",
    "realize_assignment",
    "LayoutSolver",
    "solve_for_layout",
    "solve_for_layout_exact",
    "enumerate_layouts",
    "guillotine_partitions",
    "LayoutSearchResult",
    "search_layouts",
]


class ContainerKind(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    AREA = "area"


@dataclass(frozen=True)
class Container:
    kind: ContainerKind
    width: int
    height: int
    x: int = 0
    y: int = 0
    eps: Optional[Fraction] = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ContainerKind(self.kind))
        if self.width < 1 or self.height < 1:
            raise PreconditionError("container sides must be positive")
        if self.kind is ContainerKind.AREA:
            if self.eps is None:
                raise PreconditionError("area containers need eps")
            eps = parse_fraction(self.eps)
            if not 0 < eps < 1:
                raise PreconditionError(f"area container eps must lie in (0, 1), got {eps}")
            object.__setattr__(self, "eps", eps)
        elif self.eps is not None:
            object.__setattr__(self, "eps", None)

    def cell(self) -> Rect:
        return Rect(self.x, self.y, self.width, self.height)

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def capacity(self) -> int:
        if self.kind is ContainerKind.HORIZONTAL:
            return self.height
        if self.kind is ContainerKind.VERTICAL:
            return self.width
        return self.area

    def signature(self) -> Tuple[str, int, int, Optional[Fraction]]:
        return (self.kind.value, self.width, self.height, self.eps)

    def moved(self, x: int, y: int) -> "Container":
        return Container(self.kind, self.width, self.height, x, y, self.eps)

    def is_small(self, width: int, height: int) -> bool:
        """Whether a width×height rectangle is eps-small for this area container."""
        assert self.eps is not None
        return width <= self.eps * self.width and height <= self.eps * self.height

    def to_document(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "kind": self.kind.value,
            "x": self.x,
            "y": self.y,
            "w": self.width,
            "h": self.height,
        }
        if self.eps is not None:
            doc["eps"] = str(self.eps)
        return doc


@dataclass(frozen=True)
class Layout:
    containers: Tuple[Container, ...]
    region: Region

    def __post_init__(self):
        object.__setattr__(self, "containers", tuple(self.containers))
        object.__setattr__(self, "region", tuple(self.region))

    @property
    def K(self) -> int:
        return len(self.containers)

    def problems(self) -> List[str]:
        out = []
        for index, container in enumerate(self.containers):
            if not region_contains(self.region, container.cell()):
                out.append(f"container {index} lies outside the region")
        for (a, first), (b, second) in itertools.combinations(enumerate(self.containers), 2):
            if first.cell().overlaps(second.cell()):
                out.append(f"containers {a} and {b} overlap")
        return out

    def check(self) -> None:
        problems = self.problems()
        if problems:
            raise PreconditionError("invalid layout: " + "; ".join(problems))

    def signature(self) -> Tuple[Tuple[str, int, int, Optional[Fraction]], ...]:
        """Container shapes regardless of position; equal signatures solve alike."""
        return tuple(sorted(c.signature() for c in self.containers))

    def to_document(self) -> Dict[str, Any]:
        return {"containers": [c.to_document() for c in self.containers]}

    @classmethod
    def from_document(cls, document: Mapping[str, Any], region: Region) -> "Layout":
        entries = document.get("containers") if isinstance(document, Mapping) else None
        if not isinstance(entries, list):
            raise InstanceError("layout needs a 'containers' list", field="containers")
        containers = []
        for index, entry in enumerate(entries):
            try:
                containers.append(
                    Container(
                        ContainerKind(entry["kind"]),
                        int(entry["w"]),
                        int(entry["h"]),
                        int(entry.get("x", 0)),
                        int(entry.get("y", 0)),
                        parse_fraction(entry["eps"]) if entry.get("eps") is not None else None,
                    )
                )
            except (KeyError, TypeError, ValueError) as ex:
                raise InstanceError(f"container {index}: {ex}", field="containers") from ex
        return cls(tuple(containers), region)


@dataclass(frozen=True)
class CandidateSizeSet:
    base: Tuple[int, ...]
    k: int
    n: int
    values: Tuple[int, ...]

    def __contains__(self, value: object) -> bool:
        return value in self.values

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def expand_candidate_set(
    P: Iterable[int], k: int, n: int, limit: Optional[int] = None
) -> CandidateSizeSet:
    """
    P^(k) = {(p_1 + ... + p_l) + i·p_{l+1} : p_j ∈ P, l ≤ k, 0 ≤ i ≤ n}.

    Args:
        P: non-empty set of positive integers
        k: most summands before the multiple
        n: largest multiplier
        limit: when given, values above it are dropped

    Returns:
        The deduplicated, sorted set.
    """
    base = tuple(sorted(set(P)))
    if not base or k < 0 or n < 0:
        raise PreconditionError("need non-empty P, k >= 0 and n >= 0")
    cap = math.inf if limit is None else limit
    sums = {0}
    layer = {0}
    for _ in range(k):
        layer = {s + p for s in layer for p in base if s + p <= cap}
        sums |= layer
    multiples = {i * p for p in base for i in range(n + 1) if i * p <= cap}
    values = {s + m for s in sums for m in multiples if s + m <= cap}
    return CandidateSizeSet(base, k, n, tuple(sorted(values)))


def candidate_bound(size_of_P: int, k: int, n: int) -> int:
    """Explicit upper bound on |P^(k)|: (number of sum tuples)·(|P|·(n+1))."""
    tuples = sum(size_of_P**l for l in range(k + 1))
    return tuples * size_of_P * (n + 1)


def item_sizes(items: Iterable[Item], rotations: bool = False) -> Tuple[List[int], List[int]]:
    """WIDTHS and HEIGHTS of the items; with rotations both are SIZES."""
    items = list(items)
    widths = sorted({i.width for i in items})
    heights = sorted({i.height for i in items})
    if rotations:
        sizes = sorted(set(widths) | set(heights))
        return sizes, sizes
    return widths, heights


def _ratio_order(items: Iterable[Item]) -> List[Item]:
    return sorted(items, key=lambda i: (-Fraction(i.profit, i.area), i.id))


def _greedy_by_ratio(items: Iterable[Item], area_cap: Fraction) -> List[Item]:
    chosen, used = [], 0
    for item in _ratio_order(items):
        if used + item.area > area_cap:
            break
        chosen.append(item)
        used += item.area
    return chosen


def pack_area_container(items: Sequence[Item], container: Container) -> Packing:
    """
    Pack ε-small items into an area container.

    Items are taken by non-increasing profit/area until the next one would exceed
    (1−2ε)·a(C); NFDH packs everything selected. NFDH on the whole list is tried as
    well and the more profitable packing is kept.

    Raises:
        PreconditionError: an item is not ε-small for the container.
    """
    if container.kind is not ContainerKind.AREA:
        raise PreconditionError("pack_area_container needs an area container")
    for item in items:
        if not container.is_small(item.width, item.height):
            raise PreconditionError(
                f"item is not {container.eps}-small for the container", item_id=item.id
            )
    assert container.eps is not None
    origin = (container.x, container.y)
    selected = _greedy_by_ratio(items, (1 - 2 * container.eps) * container.area)
    chosen, _ = nfdh_pack_box(selected, container.width, container.height, origin=origin)
    whole, _ = nfdh_pack_box(items, container.width, container.height, origin=origin)
    lookup = {item.id: item for item in items}
    if whole.profit(lookup) > chosen.profit(lookup):
        return whole
    return chosen


def round_container(
    container: Container, items: Sequence[Item], eps: RationalLike
) -> Tuple[Container, List[Item]]:
    """
    Shrink a container to candidate sizes, keeping most of its profit.

    Horizontal containers take width w_max. With more than 1/ε items, the cheapest
    of the 1/ε tallest is dropped and the height becomes h(TALL) + i·h_j with
    i = ceil(h(rest)/h_j), h_j the dropped item's height. Vertical containers are
    symmetric. Area containers are cut down to multiples of w_max and h_max, but
    never below ceil(w_max/ε') × ceil(h_max/ε') for the container's own ε', so the
    items stay small for it; they are then reselected by profit/area up to
    (1−2ε)·a(C) of the smaller container.

    This is an analysis helper: the layout search enumerates candidate container
    sizes directly and does not round a packing it has already found.

    Returns:
        The smaller container (same position) and the retained items.
    """
    epsilon = snap_eps(eps)
    if not items:
        return container, []
    if container.kind is ContainerKind.AREA:
        w_max = max(i.width for i in items)
        h_max = max(i.height for i in items)
        n = len(items)
        assert container.eps is not None
        width = min(
            container.width,
            max(w_max * min(n, container.width // w_max), math.ceil(w_max / container.eps)),
        )
        height = min(
            container.height,
            max(h_max * min(n, container.height // h_max), math.ceil(h_max / container.eps)),
        )
        shrunk = Container(
            container.kind, width, height, container.x, container.y, container.eps
        )
        retained = _greedy_by_ratio(items, (1 - 2 * epsilon) * shrunk.area)
        return shrunk, retained

    horizontal = container.kind is ContainerKind.HORIZONTAL

    def along(item: Item) -> int:
        return item.height if horizontal else item.width

    def across(item: Item) -> int:
        return item.width if horizontal else item.height

    per_tall = math.ceil(1 / epsilon)
    retained = list(items)
    if len(items) <= per_tall:
        length = sum(along(i) for i in items)
    else:
        tall = sorted(items, key=lambda i: (-along(i), i.id))[:per_tall]
        dropped = min(tall, key=lambda i: (i.profit, i.id))
        retained = [i for i in items if i.id != dropped.id]
        tall_ids = {i.id for i in tall}
        rest = sum(along(i) for i in retained if i.id not in tall_ids)
        step = along(dropped)
        length = sum(along(i) for i in tall) + math.ceil(Fraction(rest, step)) * step
    thickness = max(across(i) for i in retained) if retained else across(items[0])
    if horizontal:
        shrunk = Container(container.kind, thickness, length, container.x, container.y)
    else:
        shrunk = Container(container.kind, length, thickness, container.x, container.y)
    return shrunk, retained


def _entry(item: Item, container: Container, rotatable: bool) -> Tuple[Optional[int], bool]:
    """GAP size of an item in a container and whether it goes in turned."""
    w, h = item.width, item.height
    if container.kind is ContainerKind.HORIZONTAL:
        size = h if w <= container.width else None
        if rotatable and h <= container.width and (size is None or w < size):
            return w, True
        return size, False
    if container.kind is ContainerKind.VERTICAL:
        size = w if h <= container.height else None
        if rotatable and w <= container.height and (size is None or h < size):
            return h, True
        return size, False
    if container.is_small(w, h):
        return w * h, False
    if rotatable and container.is_small(h, w):
        return w * h, True
    return None, False


def layout_gap(
    instance: Instance, containers: Sequence[Container]
) -> Tuple[GapInstance, List[List[bool]]]:
    """The GAP instance of a layout: one bin per container, one element per item."""
    sizes, turned = [], []
    for item in instance.items:
        row, flags = [], []
        for container in containers:
            size, rotate = _entry(item, container, instance.can_rotate(item))
            row.append(size)
            flags.append(rotate)
        sizes.append(tuple(row))
        turned.append(flags)
    gap = GapInstance.uniform(
        tuple(c.capacity for c in containers),
        sizes,
        [item.profit for item in instance.items],
    )
    return gap, turned


def realize_assignment(
    instance: Instance,
    containers: Sequence[Container],
    assignment: Assignment,
    turned: Sequence[Sequence[bool]],
) -> List[Placement]:
    placements: List[Placement] = []
    for j, container in enumerate(containers):
        members = sorted(assignment.members(j), key=lambda i: instance.items[i].id)
        shaped = [
            (instance.items[i].turned() if turned[i][j] else instance.items[i], turned[i][j])
            for i in members
        ]
        if container.kind is ContainerKind.AREA:
            rotated = {item.id for item, flag in shaped if flag}
            packed = pack_area_container([item for item, _ in shaped], container)
            placements.extend(
                Placement(p.item_id, p.x, p.y, p.item_id in rotated) for p in packed.placements
            )
            continue
        offset = 0
        for item, flag in shaped:
            if container.kind is ContainerKind.HORIZONTAL:
                placements.append(Placement(item.id, container.x, container.y + offset, flag))
                offset += item.height
            else:
                placements.append(Placement(item.id, container.x + offset, container.y, flag))
                offset += item.width
    return placements


class LayoutSolver:
    """
    Solves layouts for one instance, memoizing on the layout signature.

    The assignment depends only on container shapes, so layouts that differ only in
    container positions share one GAP solve.
    """

    def __init__(
        self,
        instance: KnapsackInstance,
        eps: Optional[RationalLike] = None,
        exact: bool = False,
        guess_cap: Optional[int] = None,
    ):
        self.instance = instance
        self.eps = parse_fraction(eps) if eps is not None else None
        self.exact = exact
        self.guess_cap = guess_cap
        self._cache: Dict[tuple, Tuple[Assignment, List[List[bool]]]] = {}
        if not exact and self.eps is None:
            raise PreconditionError("the approximate layout solve needs eps")

    def assign(self, containers: Sequence[Container]) -> Tuple[Assignment, List[List[bool]]]:
        order = sorted(range(len(containers)), key=lambda j: containers[j].signature())
        key = tuple(containers[j].signature() for j in order)
        if key not in self._cache:
            canonical = [containers[j] for j in order]
            gap, turned = layout_gap(self.instance, canonical)
            if self.exact:
                assignment = gap_exact_dp(gap)
            else:
                assignment = gap_ptas(gap, self.eps, self.guess_cap)  # type: ignore[arg-type]
            self._cache[key] = (assignment, turned)
        assignment, turned = self._cache[key]
        # map canonical bins back to this layout's container order
        back = {canonical_j: j for canonical_j, j in enumerate(order)}
        bins = tuple(None if b is None else back[b] for b in assignment.bins)
        gap, local_turned = layout_gap(self.instance, containers)
        return Assignment.build(gap, bins, assignment.augmented, assignment.guaranteed), local_turned

    def solve(self, layout: Layout) -> Packing:
        layout.check()
        if not layout.containers:
            return Packing((), self.instance.region)
        assignment, turned = self.assign(layout.containers)
        placements = realize_assignment(self.instance, layout.containers, assignment, turned)
        return Packing(tuple(placements), self.instance.region)


def solve_for_layout(
    instance: KnapsackInstance,
    layout: Layout,
    eps: RationalLike,
    guess_cap: Optional[int] = None,
) -> Packing:
    """
    Near-optimal packing of items into a fixed container layout.

    Builds the GAP instance of the layout (a horizontal container's capacity is its
    height and an item's size its height, if its width fits; vertical containers
    are symmetric; an area container's capacity is its area and only ε-small items
    may enter), solves it with gap_ptas and realizes the assignment. With rotations
    each item takes the better orientation per container.

    Raises:
        PreconditionError: the layout overlaps itself or leaves the region.
        BudgetExceededError: propagated from the GAP solver.
    """
    return LayoutSolver(instance, eps, guess_cap=guess_cap).solve(layout)


def solve_for_layout_exact(instance: KnapsackInstance, layout: Layout) -> Packing:
    """Like solve_for_layout, with the exact GAP table."""
    return LayoutSolver(instance, exact=True).solve(layout)


@lru_cache(maxsize=4096)
def _partitions(width: int, height: int, k: int, cuts: Tuple[int, ...]) -> Tuple[Tuple[Rect, ...], ...]:
    if k == 1:
        return ((Rect(0, 0, width, height),),)
    found = set()
    for vertical in (True, False):
        extent = width if vertical else height
        for cut in cuts:
            if not 0 < cut < extent:
                continue
            for k1 in range(1, k):
                if vertical:
                    first = _partitions(cut, height, k1, cuts)
                    second = _partitions(width - cut, height, k - k1, cuts)
                    dx, dy = cut, 0
                else:
                    first = _partitions(width, cut, k1, cuts)
                    second = _partitions(width, height - cut, k - k1, cuts)
                    dx, dy = 0, cut
                for a in first:
                    for b in second:
                        moved = tuple(Rect(r.x + dx, r.y + dy, r.width, r.height) for r in b)
                        found.add(tuple(sorted(a + moved, key=lambda r: (r.y, r.x))))
    return tuple(sorted(found, key=lambda cells: [(r.y, r.x, r.width, r.height) for r in cells]))


def guillotine_partitions(region: Rect, k: int, cuts: Iterable[int]) -> List[Tuple[Rect, ...]]:
    """Partitions of `region` into exactly k cells by guillotine cuts at offsets from `cuts`."""
    relative = _partitions(region.width, region.height, k, tuple(sorted(set(cuts))))
    return [
        tuple(Rect(r.x + region.x, r.y + region.y, r.width, r.height) for r in cells)
        for cells in relative
    ]


_KINDS = (ContainerKind.HORIZONTAL, ContainerKind.VERTICAL, ContainerKind.AREA)


def _cell_options(
    cell: Rect, kind: ContainerKind, eps: Fraction, sizes: Sequence[int], shrink: bool
) -> List[Container]:
    area_eps = eps if kind is ContainerKind.AREA else None
    options = [Container(kind, cell.width, cell.height, cell.x, cell.y, area_eps)]
    if shrink:
        for w in sizes:
            for h in sizes:
                if 0 < w <= cell.width and 0 < h <= cell.height and (w, h) != (cell.width, cell.height):
                    options.append(Container(kind, w, h, cell.x, cell.y, area_eps))
    return options


def enumerate_layouts(
    instance: Optional[KnapsackInstance],
    K_max: int,
    size_source: Optional[Iterable[int]],
    region: Rect,
    eps: RationalLike = Fraction(1, 4),
    shrink_to_sizes: bool = False,
    budget: Optional[int] = None,
) -> Iterator[Layout]:
    """
    Stream the container layouts with at most K_max containers in `region`.

    The region is cut by guillotine cuts whose offsets come from the size set; each
    cell holds one container of each kind. Any two or three disjoint boxes can be
    separated by such cuts, so up to K_max = 3 this covers every arrangement once
    containers are grown to fill their cells. With `shrink_to_sizes` each cell may
    also hold a smaller container with sides from the size set, anchored at the
    cell's bottom-left corner.

    Args:
        instance: used for the default size set when `size_source` is None
        K_max: most containers per layout
        size_source: cut offsets and container sides (e.g. a CandidateSizeSet)
        region: the rectangle to fill
        eps: granularity of area containers
        shrink_to_sizes: also yield containers smaller than their cells
        budget: most layouts to yield (config `layout_budget`)

    Yields:
        Layouts in a fixed order: fewer containers first.

    Raises:
        BudgetExceededError: more than `budget` layouts were requested.
    """
    epsilon = parse_fraction(eps)
    if size_source is None:
        if instance is None:
            raise PreconditionError("need an instance or an explicit size set")
        widths, heights = item_sizes(instance.items, instance.rotations)
        base = set(widths) | set(heights) or {max(region.width, 1)}
        size_source = expand_candidate_set(
            base, 1, len(instance.items), max(region.width, region.height)
        )
    sizes = sorted({s for s in size_source if s > 0})
    limit = budget if budget is not None else int(get_config("layout_budget", 20000))
    region_tuple = (region,)
    seen = set()
    count = 0
    if region.width <= 0 or region.height <= 0:
        return
    for k in range(1, K_max + 1):
        for cells in guillotine_partitions(region, k, sizes):
            for kinds in itertools.product(_KINDS, repeat=k):
                per_cell = [
                    _cell_options(cell, kind, epsilon, sizes, shrink_to_sizes)
                    for cell, kind in zip(cells, kinds)
                ]
                for containers in itertools.product(*per_cell):
                    key = tuple(sorted((c.kind.value, c.x, c.y, c.width, c.height) for c in containers))
                    if key in seen:
                        continue
                    seen.add(key)
                    count += 1
                    if count > limit:
                        raise BudgetExceededError("layout_budget", limit)
                    yield Layout(tuple(containers), region_tuple)


@dataclass(frozen=True)
class LayoutSearchResult:
    packing: Packing
    profit: int
    layout: Optional[Layout]
    exhausted: bool
    evaluated: int


def search_layouts(
    instance: KnapsackInstance,
    region: Rect,
    eps: RationalLike,
    K_max: Optional[int] = None,
    budget: Optional[int] = None,
    exact: bool = False,
    size_source: Optional[Iterable[int]] = None,
) -> LayoutSearchResult:
    """
    Best container packing of `instance`'s items inside `region`.

    Layouts stream from enumerate_layouts; the first layout reaching the best profit
    wins. Hitting the layout budget ends the search with the best packing so far and
    `exhausted` set.
    """
    k_max = K_max if K_max is not None else int(get_config("layout_k_max", 2))
    solver = LayoutSolver(instance, eps, exact=exact)
    best = Packing((), instance.region)
    best_profit, best_layout = 0, None
    exhausted = False
    evaluated = 0
    if not instance.items:
        return LayoutSearchResult(best, 0, None, False, 0)
    layouts = enumerate_layouts(instance, k_max, size_source, region, eps, budget=budget)
    try:
        for layout in layouts:
            evaluated += 1
            packing = solver.solve(layout)
            profit = packing.profit(instance.item_map)
            if profit > best_profit:
                best, best_profit, best_layout = packing, profit, layout
                if best_profit == instance.total_profit:
                    break
    except BudgetExceededError as ex:
        log(f"Layout search stopped early: {ex}", "info")
        exhausted = True
    return LayoutSearchResult(best, best_profit, best_layout, exhausted, evaluated)
