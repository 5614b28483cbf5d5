# coding=utf-8
"""
Seeded random instances.

Every generator takes an integer seed and draws from numpy's `default_rng`, so a
seed always gives the same instance. Distributions:

- `uniform`: sides uniform in [1, side_max], profits uniform in [1, 10].
- `long`: a mix of horizontal (w > N/2), vertical (h > N/2) and short items.
- `small`: ε-small items, both sides ≤ ε·N.
- `containers`: items that exactly fill one or two containers of a random
  guillotine split of the knapsack, so everything fits.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional

import numpy as np

from .config import RationalLike, parse_fraction
from .core import Item, KnapsackInstance, LInstance, PackingMode, StripInstance

__all__ = [
    "uniform_items",
    "uniform_knapsack",
    "uniform_strip",
    "long_mix_knapsack",
    "small_mix_strip",
    "small_mix_knapsack",
    "container_knapsack",
    "random_lpack",
    "GENERATORS",
]


def _ints(rng: np.random.Generator, low: int, high: int, size: int) -> List[int]:
    """`size` integers uniform in [low, high]."""
    return [int(v) for v in rng.integers(low, high, size=size, endpoint=True)]


def uniform_items(
    rng: np.random.Generator,
    n: int,
    max_w: int,
    max_h: int,
    max_profit: int = 10,
    prefix: str = "i",
) -> List[Item]:
    widths = _ints(rng, 1, max_w, n)
    heights = _ints(rng, 1, max_h, n)
    profits = _ints(rng, 1, max_profit, n)
    return [Item(f"{prefix}{k}", w, h, p) for k, (w, h, p) in enumerate(zip(widths, heights, profits))]


def uniform_knapsack(
    seed: int,
    n: int = 5,
    N: int = 10,
    side_max: Optional[int] = None,
    rotations: bool = False,
    cardinality: bool = False,
) -> KnapsackInstance:
    rng = np.random.default_rng(seed)
    side = side_max or N
    items = uniform_items(rng, n, side, side, 1 if cardinality else 10)
    mode = PackingMode.CARDINALITY if cardinality else PackingMode.WEIGHTED
    return KnapsackInstance(N, tuple(items), mode, rotations)


def uniform_strip(
    seed: int, n: int = 20, W: int = 20, h_max: Optional[int] = None, rotations: bool = False
) -> StripInstance:
    rng = np.random.default_rng(seed)
    items = uniform_items(rng, n, W, h_max or W, 1)
    return StripInstance(W, tuple(items), rotations)


def long_mix_knapsack(seed: int, n: int = 6, N: int = 10, share: float = 0.5) -> KnapsackInstance:
    """About `share` of the items long, split evenly between horizontal and vertical."""
    rng = np.random.default_rng(seed)
    long_low = N // 2 + 1
    items = []
    for k in range(n):
        profit = int(rng.integers(1, 10, endpoint=True))
        if rng.random() < share:
            length = int(rng.integers(long_low, N, endpoint=True))
            thickness = int(rng.integers(1, max(1, N // 4), endpoint=True))
            if rng.random() < 0.5:
                items.append(Item(f"h{k}", length, thickness, profit))
            else:
                items.append(Item(f"v{k}", thickness, length, profit))
        else:
            w, h = _ints(rng, 1, max(1, N // 2), 2)
            items.append(Item(f"s{k}", w, h, profit))
    return KnapsackInstance(N, tuple(items))


def _small_items(rng: np.random.Generator, n: int, w_cap: int, h_cap: int, max_profit: int) -> List[Item]:
    return uniform_items(rng, n, max(1, w_cap), max(1, h_cap), max_profit, prefix="e")


def small_mix_strip(seed: int, n: int = 30, W: int = 50, eps: RationalLike = "1/5") -> StripInstance:
    """Items with width ≤ ε·W and height ≤ ε·W."""
    rng = np.random.default_rng(seed)
    cap = int(parse_fraction(eps) * W)
    return StripInstance(W, tuple(_small_items(rng, n, cap, cap, 1)))


def small_mix_knapsack(seed: int, n: int = 20, N: int = 50, eps: RationalLike = "1/5") -> KnapsackInstance:
    rng = np.random.default_rng(seed)
    cap = int(parse_fraction(eps) * N)
    return KnapsackInstance(N, tuple(_small_items(rng, n, cap, cap, 10)))


def _stack(rng: np.random.Generator, length: int, thickness: int, prefix: str, horizontal: bool) -> List[Item]:
    """Items whose lengths add up to `length`, each at most `thickness` across."""
    items = []
    used, k = 0, 0
    while used < length:
        piece = int(rng.integers(1, length - used, endpoint=True))
        across = int(rng.integers(1, thickness, endpoint=True))
        profit = int(rng.integers(1, 10, endpoint=True))
        w, h = (across, piece) if horizontal else (piece, across)
        items.append(Item(f"{prefix}{k}", w, h, profit))
        used += piece
        k += 1
    return items


def container_knapsack(seed: int, N: int = 10, extra: int = 2) -> KnapsackInstance:
    """
    Items that fill a layout of at most two containers, plus `extra` random items.

    The knapsack is cut once at a random offset; each part is a horizontal or
    vertical container filled exactly by a stack.
    """
    rng = np.random.default_rng(seed)
    items: List[Item] = []
    if N >= 2 and rng.random() < 0.5:
        cut = int(rng.integers(1, N - 1, endpoint=True))
        parts = [(N, cut), (N, N - cut)] if rng.random() < 0.5 else [(cut, N), (N - cut, N)]
    else:
        parts = [(N, N)]
    for index, (w, h) in enumerate(parts):
        horizontal = bool(rng.random() < 0.5)
        if horizontal:
            items.extend(_stack(rng, h, w, f"c{index}_", True))
        else:
            items.extend(_stack(rng, w, h, f"c{index}_", False))
    for k in range(extra):
        w, h = _ints(rng, 1, N, 2)
        items.append(Item(f"x{k}", w, h, int(rng.integers(1, 10, endpoint=True))))
    return KnapsackInstance(N, tuple(items))


def random_lpack(seed: int, n: int = 5, N: int = 12, arm: Optional[int] = None) -> LInstance:
    rng = np.random.default_rng(seed)
    long_low = N // 2 + 1
    width = arm or int(rng.integers(1, max(1, N // 2), endpoint=True))
    height = arm or int(rng.integers(1, max(1, N // 2), endpoint=True))
    items = []
    for k in range(n):
        length = int(rng.integers(long_low, N, endpoint=True))
        thickness = int(rng.integers(1, max(1, N // 3), endpoint=True))
        profit = int(rng.integers(1, 10, endpoint=True))
        if rng.random() < 0.5:
            items.append(Item(f"h{k}", length, thickness, profit))
        else:
            items.append(Item(f"v{k}", thickness, length, profit))
    return LInstance.from_items(N, width, height, items)


GENERATORS: Dict[str, Callable[..., object]] = {
    "uniform": uniform_knapsack,
    "uniform-strip": uniform_strip,
    "long": long_mix_knapsack,
    "small": small_mix_knapsack,
    "small-strip": small_mix_strip,
    "containers": container_knapsack,
    "lpack": random_lpack,
}
