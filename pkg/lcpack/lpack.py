# coding=utf-8
"""
L-packings.

Horizontal items (width > N/2) sit right-aligned in the bottom arm of the L, widest
at the bottom; vertical items (height > N/2) sit top-aligned in the left arm,
tallest at the left. A dynamic program over (next horizontal, current top t, next
vertical, current right r) decides which items to take. Restricting t to a candidate
set T and r to a set R gives the restricted program; T = R = {0, ..., N} gives the
exact optimum. Candidate values are exact rationals; coordinates are floored when
the packing is emitted.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from .config import RationalLike, get_config, log, parse_fraction
from .core import (
    BudgetExceededError,
    Item,
    LInstance,
    Packing,
    Placement,
    PreconditionError,
    Rect,
    snap_eps,
)

__all__ = [
    "CandidateCoords",
    "Transition",
    "LPackResult",
    "candidate_values",
    "candidate_size_bound",
    "build_candidate_coords",
    "lpack_dp",
    "lpack_exact",
    "lpack_ptas",
    "lpack_oracle",
]


@dataclass(frozen=True)
class CandidateCoords:
    T: Tuple[Fraction, ...]
    R: Tuple[Fraction, ...]
    level: int


@dataclass(frozen=True)
class Transition:
    """One placement of the DP: the state (t, r) before it and the new top or right."""

    kind: str
    item_id: str
    t: Fraction
    r: Fraction
    coordinate: Fraction


@dataclass(frozen=True)
class LPackResult:
    packing: Packing
    profit: int
    transitions: Tuple[Transition, ...] = ()
    t_level: Optional[int] = None
    r_level: Optional[int] = None


def _sumset(values: Sequence[Fraction], times: int, limit: Fraction, budget: int) -> set:
    """Sums of at most `times` values (with repetition), pruned to ≤ limit."""
    sums = {Fraction(0)}
    layer = {Fraction(0)}
    for _ in range(times):
        layer = {s + v for s in layer for v in values if s + v <= limit}
        if not layer - sums:
            break
        sums |= layer
        if len(sums) > budget:
            raise BudgetExceededError("lpack_candidate_budget", budget, len(sums))
    return sums


def candidate_values(
    lengths: Sequence[int],
    n: int,
    eps: RationalLike,
    r: int,
    N: int,
    budget: Optional[int] = None,
) -> Tuple[Fraction, ...]:
    """
    The candidate set of level r for one side of the L, 0 included.

    Level 1 holds a·h/(2n) for every length h and 1 ≤ a ≤ 4n². Level r holds
    a·h/2 (0 ≤ a ≤ 2n−1) plus a sum of at most 1/ε − 1 lengths plus a sum of at most
    1/ε values of level r−1. Values above N are dropped.
    """
    epsilon = snap_eps(eps)
    m = int(1 / epsilon)
    if r < 1 or r > m:
        raise PreconditionError(f"level r must lie in [1, {m}], got {r}")
    limit = budget if budget is not None else int(get_config("lpack_candidate_budget", 250000))
    top = Fraction(N)
    lengths = sorted(set(lengths))
    if not lengths or n < 1:
        return (Fraction(0),)
    level = {
        Fraction(a * h, 2 * n)
        for h in lengths
        for a in range(1, 4 * n * n + 1)
        if Fraction(a * h, 2 * n) <= top
    }
    for _ in range(2, r + 1):
        halves = sorted({Fraction(a * h, 2) for h in lengths for a in range(2 * n) if Fraction(a * h, 2) <= top})
        heights = _sumset([Fraction(h) for h in lengths], m - 1, top, limit)
        previous = _sumset(sorted(level), m, top, limit)
        partial = {a + b for a in halves for b in heights if a + b <= top}
        if len(partial) > limit:
            raise BudgetExceededError("lpack_candidate_budget", limit, len(partial))
        level = {a + c for a in partial for c in previous if a + c <= top}
        if len(level) > limit:
            raise BudgetExceededError("lpack_candidate_budget", limit, len(level))
    level.add(Fraction(0))
    return tuple(sorted(level))


def candidate_size_bound(n: int, eps: RationalLike, r: int) -> float:
    """(2n)^((r + 2 + (r−1)ε) / ε^(r−1)), the bound on the level-r set size."""
    epsilon = snap_eps(eps)
    exponent = (r + 2 + (r - 1) * epsilon) / epsilon ** (r - 1)
    return float(2 * n) ** float(exponent)


def build_candidate_coords(instance: LInstance, eps: RationalLike, r: int) -> CandidateCoords:
    """Candidate tops T (horizontal heights) and rights R (vertical widths) of level r."""
    n = len(instance.items)
    T = candidate_values([i.height for i in instance.horizontal], n, eps, r, instance.N)
    R = candidate_values([i.width for i in instance.vertical], n, eps, r, instance.N)
    return CandidateCoords(T, R, r)


def _normalize(values: Iterable[RationalLike]) -> List[Fraction]:
    out = sorted({parse_fraction(v) for v in values} | {Fraction(0)})
    if out[0] < 0:
        raise PreconditionError("candidate coordinates must be non-negative")
    return out


def lpack_dp(
    instance: LInstance,
    T: Iterable[RationalLike],
    R: Iterable[RationalLike],
) -> LPackResult:
    """
    Optimal (T, R)-restricted L-packing.

    From state (i, t, j, r) the program may skip h_i, skip v_j, place h_i with its
    top at the smallest t' ∈ T with t' ≥ t + h(h_i) (needs w(h_i) ≤ N − r and
    t' ≤ h_L), or place v_j with its right side at the smallest r' ∈ R with
    r' ≥ r + w(v_j) (needs h(v_j) ≤ N − t and r' ≤ w_L).

    Args:
        instance: the L instance
        T: candidate tops; 0 is added if missing
        R: candidate rights; 0 is added if missing

    Returns:
        An LPackResult with the packing and the sequence of placements taken.

    Raises:
        BudgetExceededError: the state space exceeds `lpack_state_budget`.
    """
    tops = _normalize(T)
    rights = _normalize(R)
    N = instance.N
    horizontal = sorted(instance.horizontal, key=lambda i: (-i.width, i.id))
    vertical = sorted(instance.vertical, key=lambda i: (-i.height, i.id))
    states = len(tops) * len(rights) * (len(horizontal) + 1) * (len(vertical) + 1)
    limit = int(get_config("lpack_state_budget", 5000000))
    if states > limit:
        raise BudgetExceededError("lpack_state_budget", limit, states)

    def next_index(values: List[Fraction], at_least: Fraction) -> Optional[int]:
        index = bisect.bisect_left(values, at_least)
        return index if index < len(values) else None

    @lru_cache(maxsize=None)
    def best(i: int, ti: int, j: int, ri: int) -> Tuple[int, int]:
        """(profit, move) with move 0 = place h_i, 1 = place v_j, 2 = skip h_i, 3 = skip v_j."""
        t, r = tops[ti], rights[ri]
        options: List[Tuple[int, int]] = []
        if i < len(horizontal):
            item = horizontal[i]
            k = next_index(tops, t + item.height)
            if k is not None and tops[k] <= instance.h_L and item.width <= N - r:
                options.append((item.profit + best(i + 1, k, j, ri)[0], 0))
        if j < len(vertical):
            item = vertical[j]
            k = next_index(rights, r + item.width)
            if k is not None and rights[k] <= instance.w_L and item.height <= N - t:
                options.append((item.profit + best(i, ti, j + 1, k)[0], 1))
        if i < len(horizontal):
            options.append((best(i + 1, ti, j, ri)[0], 2))
        if j < len(vertical):
            options.append((best(i, ti, j + 1, ri)[0], 3))
        if not options:
            return 0, -1
        # first option wins ties
        return max(options, key=lambda option: (option[0], -option[1]))

    placements: List[Placement] = []
    transitions: List[Transition] = []
    i = ti = j = ri = 0
    profit = best(0, 0, 0, 0)[0]
    while True:
        _, move = best(i, ti, j, ri)
        t, r = tops[ti], rights[ri]
        if move == 0:
            item = horizontal[i]
            k = next_index(tops, t + item.height)
            assert k is not None
            placements.append(Placement(item.id, N - item.width, math.floor(tops[k] - item.height)))
            transitions.append(Transition("horizontal", item.id, t, r, tops[k]))
            i, ti = i + 1, k
        elif move == 1:
            item = vertical[j]
            k = next_index(rights, r + item.width)
            assert k is not None
            placements.append(Placement(item.id, math.floor(rights[k] - item.width), N - item.height))
            transitions.append(Transition("vertical", item.id, t, r, rights[k]))
            j, ri = j + 1, k
        elif move == 2:
            i += 1
        elif move == 3:
            j += 1
        else:
            break
    best.cache_clear()
    return LPackResult(Packing(tuple(placements), instance.region), profit, tuple(transitions))


def lpack_exact(instance: LInstance) -> LPackResult:
    """Exact optimum: the restricted program with T = R = {0, 1, ..., N}."""
    grid = range(instance.N + 1)
    return lpack_dp(instance, grid, grid)


def lpack_ptas(instance: LInstance, eps: RationalLike) -> LPackResult:
    """
    Best restricted L-packing over all levels of the candidate sets.

    ε is snapped to 1/ceil(1/ε); every pair of levels (r_hor, r_ver) in
    {1, ..., 1/ε}² is tried. The profit is at least (1−2ε) times the exact optimum.

    Raises:
        PreconditionError: ε is below `lpack_min_eps`.
        BudgetExceededError: a candidate set outgrew `lpack_candidate_budget`.
    """
    epsilon = snap_eps(eps)
    minimum = parse_fraction(get_config("lpack_min_eps", "1/4"))
    if epsilon < minimum:
        raise PreconditionError(f"eps {epsilon} is below the configured minimum {minimum}")
    m = int(1 / epsilon)
    n = len(instance.items)
    tops = {
        r: candidate_values([i.height for i in instance.horizontal], n, epsilon, r, instance.N)
        for r in range(1, m + 1)
    }
    rights = {
        r: candidate_values([i.width for i in instance.vertical], n, epsilon, r, instance.N)
        for r in range(1, m + 1)
    }
    best: Optional[LPackResult] = None
    for t_level, r_level in itertools.product(range(1, m + 1), repeat=2):
        result = lpack_dp(instance, tops[t_level], rights[r_level])
        if best is None or result.profit > best.profit:
            best = LPackResult(result.packing, result.profit, result.transitions, t_level, r_level)
    assert best is not None
    log(f"lpack_ptas: profit {best.profit} at levels {best.t_level}/{best.r_level}", "debug")
    return best


def _canonical(instance: LInstance, horizontal: Sequence[Item], vertical: Sequence[Item]) -> Optional[List[Placement]]:
    N = instance.N
    placements: List[Placement] = []
    rects: List[Rect] = []
    y = 0
    for item in sorted(horizontal, key=lambda i: (-i.width, i.id)):
        rects.append(Rect(N - item.width, y, item.width, item.height))
        placements.append(Placement(item.id, N - item.width, y))
        y += item.height
    if y > instance.h_L:
        return None
    x = 0
    for item in sorted(vertical, key=lambda i: (-i.height, i.id)):
        rects.append(Rect(x, N - item.height, item.width, item.height))
        placements.append(Placement(item.id, x, N - item.height))
        x += item.width
    if x > instance.w_L:
        return None
    for a, b in itertools.combinations(rects, 2):
        if a.overlaps(b):
            return None
    return placements


def lpack_oracle(instance: LInstance) -> LPackResult:
    """
    Exhaustive L-packing by subsets.

    Each pair of subsets is laid out canonically (horizontal items stacked from the
    bottom, widest first, right-aligned; vertical items side by side from the left,
    tallest first, top-aligned) and checked geometrically.
    """

    def subsets(items: Sequence[Item]):
        for size in range(len(items) + 1):
            yield from itertools.combinations(items, size)

    best_profit, best_placements = 0, []
    for horizontal in subsets(instance.horizontal):
        for vertical in subsets(instance.vertical):
            profit = sum(i.profit for i in horizontal) + sum(i.profit for i in vertical)
            if profit <= best_profit:
                continue
            placements = _canonical(instance, horizontal, vertical)
            if placements is not None:
                best_profit, best_placements = profit, placements
    return LPackResult(Packing(tuple(best_placements), instance.region), best_profit)
