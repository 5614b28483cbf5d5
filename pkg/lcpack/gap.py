# coding=utf-8
"""
Maximum generalized assignment with a constant number of bins.

Element i placed in bin j uses s_ij of the bin's capacity c_j and earns p_ij; s_ij
may be None when i does not fit bin j at all. Three solvers are provided: the exact
pseudo-polynomial table, the same table on rounded sizes (which may overfill a bin
by a factor 1+ε but never loses against the optimum), and the guessing scheme that
respects capacities and keeps a (1−3ε) fraction of the optimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import RationalLike, get_config, log, parse_fraction
from .core import BudgetExceededError, PreconditionError, snap_eps

__all__ = [
    "GapInstance",
    "Assignment",
    "table_cells",
    "gap_exact_dp",
    "gap_resource_augmented",
    "gap_ptas",
    "shifting_decomposition",
    "cheapest_interval",
]

Size = Optional[int]


@dataclass(frozen=True)
class GapInstance:
    capacities: Tuple[int, ...]
    sizes: Tuple[Tuple[Size, ...], ...]
    profits: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(self.capacities))
        object.__setattr__(self, "sizes", tuple(tuple(row) for row in self.sizes))
        object.__setattr__(self, "profits", tuple(tuple(row) for row in self.profits))
        k = len(self.capacities)
        limit = int(get_config("gap_max_bins", 4))
        if k > limit:
            raise PreconditionError(f"{k} bins exceed the configured limit of {limit}")
        if any(c < 0 for c in self.capacities):
            raise PreconditionError("bin capacities must be non-negative")
        if len(self.sizes) != len(self.profits):
            raise PreconditionError("sizes and profits need one row per element")
        for i, (sizes, profits) in enumerate(zip(self.sizes, self.profits)):
            if len(sizes) != k or len(profits) != k:
                raise PreconditionError(f"element {i} needs one size and profit per bin")
            if any(s is not None and s < 1 for s in sizes):
                raise PreconditionError(f"element {i} has a non-positive size")
            if any(p < 0 for p in profits):
                raise PreconditionError(f"element {i} has a negative profit")

    @classmethod
    def uniform(
        cls, capacities: Sequence[int], sizes: Sequence[Sequence[Size]], profits: Sequence[int]
    ) -> "GapInstance":
        """Instance whose element profits do not depend on the bin."""
        k = len(capacities)
        return cls(tuple(capacities), tuple(map(tuple, sizes)), tuple((p,) * k for p in profits))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def k(self) -> int:
        return len(self.capacities)

    def fits(self, i: int, j: int) -> bool:
        s = self.sizes[i][j]
        return s is not None and s <= self.capacities[j]


@dataclass(frozen=True)
class Assignment:
    bins: Tuple[Optional[int], ...]
    profit: int
    loads: Tuple[int, ...]
    augmented: bool = False
    guaranteed: bool = True

    def members(self, j: int) -> List[int]:
        return [i for i, b in enumerate(self.bins) if b == j]

    @classmethod
    def build(
        cls,
        instance: GapInstance,
        bins: Sequence[Optional[int]],
        augmented: bool = False,
        guaranteed: bool = True,
    ) -> "Assignment":
        loads = [0] * instance.k
        profit = 0
        for i, j in enumerate(bins):
            if j is None:
                continue
            size = instance.sizes[i][j]
            if size is None:
                raise PreconditionError(f"element {i} cannot go to bin {j}")
            loads[j] += size
            profit += instance.profits[i][j]
        return cls(tuple(bins), profit, tuple(loads), augmented, guaranteed)


def table_cells(capacities: Sequence[int]) -> int:
    return math.prod(c + 1 for c in capacities)


def gap_exact_dp(instance: GapInstance, budget: Optional[int] = None) -> Assignment:
    """
    Optimal assignment by the table P[i, d_1, ..., d_k].

    P[i, d] is the best profit of the first i elements with bin loads at most d. The
    table is kept one element layer at a time; a per-element choice log (-1 for
    "not assigned", j for bin j) is enough to backtrack from d = c.

    Args:
        instance: the GAP instance
        budget: maximum n·∏(c_j+1) cells (config `gap_table_budget`)

    Returns:
        A profit-optimal Assignment. Ties prefer leaving an element out, then the
        lowest bin index.

    Raises:
        BudgetExceededError: the table would exceed the budget.
    """
    n, k = instance.n, instance.k
    if n == 0 or k == 0:
        return Assignment.build(instance, [None] * n)
    limit = budget if budget is not None else int(get_config("gap_table_budget", 20000000))
    cells = table_cells(instance.capacities)
    if cells * n > limit:
        raise BudgetExceededError("gap_table_budget", limit, cells * n)

    shape = tuple(c + 1 for c in instance.capacities)
    best = np.zeros(shape, dtype=np.int64)
    choices = np.full((n,) + shape, -1, dtype=np.int8)
    for i in range(n):
        layer = best.copy()
        choice = choices[i]
        for j in range(k):
            size = instance.sizes[i][j]
            if size is None or size >= shape[j]:
                continue
            candidate = np.full(shape, -1, dtype=np.int64)
            target = [slice(None)] * k
            source = [slice(None)] * k
            target[j] = slice(size, None)
            source[j] = slice(0, shape[j] - size)
            candidate[tuple(target)] = best[tuple(source)] + instance.profits[i][j]
            better = candidate > layer
            layer = np.where(better, candidate, layer)
            choice[better] = j
        best = layer

    bins: List[Optional[int]] = [None] * n
    residual = list(instance.capacities)
    for i in reversed(range(n)):
        j = int(choices[(i,) + tuple(residual)])
        if j >= 0:
            bins[i] = j
            residual[j] -= instance.sizes[i][j]  # type: ignore[operator]
    result = Assignment.build(instance, bins)
    assert result.profit == int(best[tuple(instance.capacities)])
    return result


def gap_resource_augmented(instance: GapInstance, eps: RationalLike) -> Assignment:
    """
    Exact table on rounded sizes, allowing each bin a load of (1+ε)·c_j.

    With μ_j = ε·c_j/n, sizes become ceil(s_ij/μ_j) and capacities
    floor((1+ε)·c_j/μ_j). Any assignment feasible for the original capacities stays
    feasible after rounding, so the profit is at least the unrounded optimum.

    Returns:
        An Assignment flagged `augmented`; its loads are in original units.
    """
    epsilon = parse_fraction(eps)
    if epsilon <= 0:
        raise PreconditionError(f"eps must be positive, got {epsilon}")
    n = instance.n
    if n == 0:
        return Assignment.build(instance, [], augmented=True)
    capacities, sizes = [], []
    for c in instance.capacities:
        capacities.append(math.floor((1 + epsilon) * n / epsilon) if c > 0 else 0)
    for row in instance.sizes:
        rounded: List[Size] = []
        for j, s in enumerate(row):
            c = instance.capacities[j]
            if s is None or c == 0:
                rounded.append(None)
            else:
                rounded.append(math.ceil(Fraction(s * n) / (epsilon * c)))
        sizes.append(tuple(rounded))
    scaled = GapInstance(tuple(capacities), tuple(sizes), instance.profits)
    solved = gap_exact_dp(scaled)
    return Assignment.build(instance, solved.bins, augmented=True)


def _large_first_ok(sizes: Sequence[int], capacity: int, epsilon: Fraction) -> bool:
    residual = capacity
    for size in sorted(sizes, reverse=True):
        if size > residual or size <= epsilon * residual:
            return False
        residual -= size
    return True


def _guesses(
    instance: GapInstance, epsilon: Fraction, cap: int
) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Disjoint per-bin sets of elements that are large for the residual bin."""

    def extend(j: int, used: frozenset) -> Iterator[Tuple[Tuple[int, ...], ...]]:
        if j == instance.k:
            yield ()
            return
        pool = [
            i for i in range(instance.n) if i not in used and instance.fits(i, j)
        ]
        for count in range(cap + 1):
            for chosen in itertools.combinations(pool, count):
                if count and not _large_first_ok(
                    [instance.sizes[i][j] for i in chosen],  # type: ignore[misc]
                    instance.capacities[j],
                    epsilon,
                ):
                    continue
                for tail in extend(j + 1, used | set(chosen)):
                    yield (chosen,) + tail

    return extend(0, frozenset())


def gap_ptas(
    instance: GapInstance, eps: RationalLike, guess_cap: Optional[int] = None
) -> Assignment:
    """
    Capacity-respecting assignment with profit at least (1−3ε)·optimum.

    Every bin j gets a guessed set X_j of at most `guess_cap` elements, each large
    relative to the capacity left when it is added. The other elements are assigned
    by gap_resource_augmented on capacities floor((1−ε)·c'_j), where c'_j is the
    capacity left after X_j; since (1+ε)(1−ε) ≤ 1 the result fits. When the exact
    table is no larger than `gap_exact_cutoff` cells the exact optimum is returned.

    Args:
        instance: the GAP instance
        eps: accuracy, 0 < ε < 1
        guess_cap: largest guessed set per bin (config `gap_guess_cap`)

    Returns:
        The best Assignment over all guesses, first in enumeration order on ties.
        `guaranteed` is cleared when `guess_cap` is below 1/ε².
    """
    epsilon = parse_fraction(eps)
    if not 0 < epsilon < 1:
        raise PreconditionError(f"need 0 < eps < 1, got {epsilon}")
    cap = guess_cap if guess_cap is not None else int(get_config("gap_guess_cap", 2))
    if instance.n == 0 or instance.k == 0:
        return Assignment.build(instance, [None] * instance.n)
    if table_cells(instance.capacities) * instance.n <= int(get_config("gap_exact_cutoff", 250000)):
        return gap_exact_dp(instance)

    guaranteed = cap >= math.ceil(1 / epsilon**2)
    guess_limit = int(get_config("gap_guess_budget", 20000))
    best: Optional[Assignment] = None
    for count, guess in enumerate(_guesses(instance, epsilon, cap)):
        if count >= guess_limit:
            log(f"gap_ptas stopped after {guess_limit} guesses", "warning")
            guaranteed = False
            break
        fixed: List[Optional[int]] = [None] * instance.n
        residual = list(instance.capacities)
        for j, chosen in enumerate(guess):
            for i in chosen:
                fixed[i] = j
                residual[j] -= instance.sizes[i][j]  # type: ignore[operator]
        rest = [i for i in range(instance.n) if fixed[i] is None]
        shrunk = tuple(math.floor((1 - epsilon) * c) for c in residual)
        sub = GapInstance(
            shrunk,
            tuple(instance.sizes[i] for i in rest),
            tuple(instance.profits[i] for i in rest),
        )
        solved = gap_resource_augmented(sub, epsilon)
        for position, i in enumerate(rest):
            fixed[i] = solved.bins[position]
        candidate = Assignment.build(instance, fixed, guaranteed=guaranteed)
        if best is None or candidate.profit > best.profit:
            best = candidate
    assert best is not None
    return Assignment(best.bins, best.profit, best.loads, False, guaranteed)


def shifting_decomposition(
    sizes: Sequence[int], profits: Sequence[int], capacity: int, eps: RationalLike
) -> Tuple[List[int], List[int]]:
    """
    Split one bin's content into a few large elements X and a cheap set Y.

    Q_1 holds the elements larger than ε·c; Q_{t+1} the remaining elements larger
    than ε times the capacity left after X = Q_1 ∪ ... ∪ Q_t. The first Q_t with
    profit at most ε·p(all) becomes Y.

    Returns:
        (X, Y) as index lists. |X| ≤ 1/ε², p(Y) ≤ ε·p(all), and every element
        outside X ∪ Y has size at most ε·(c − s(X)).
    """
    epsilon = snap_eps(eps)
    total = sum(profits)
    chosen: List[int] = []
    residual = capacity
    while True:
        layer = [
            i
            for i in range(len(sizes))
            if i not in chosen and sizes[i] > epsilon * residual
        ]
        if sum(profits[i] for i in layer) <= epsilon * total:
            return chosen, layer
        chosen.extend(layer)
        residual = capacity - sum(sizes[i] for i in chosen)


def cheapest_interval(
    offsets: Sequence[Tuple[Fraction, int]],
    profits: Sequence[int],
    residual: int,
    eps: RationalLike,
) -> Tuple[int, List[int]]:
    """
    Cut the residual space [0, c') into 1/ε intervals of length ε·c' and find the
    interval whose intersecting elements are cheapest (lowest index on ties).

    Args:
        offsets: (start, size) of each element laid out in the residual space
        profits: element profits
        residual: the residual capacity c'
        eps: ε, rounded down to 1/ceil(1/ε)

    Returns:
        The interval index and the elements intersecting it.
    """
    epsilon = snap_eps(eps)
    count = math.ceil(1 / epsilon)
    length = epsilon * residual
    best_index, best_members, best_profit = 0, [], None
    for index in range(count):
        low, high = index * length, (index + 1) * length
        members = [
            i for i, (start, size) in enumerate(offsets) if start < high and start + size > low
        ]
        profit = sum(profits[i] for i in members)
        if best_profit is None or profit < best_profit:
            best_index, best_members, best_profit = index, members, profit
    return best_index, best_members
