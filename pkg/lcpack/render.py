# coding=utf-8
"""SVG pictures of packings."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import svgwrite

from .core import (
    Instance,
    InfeasiblePackingError,
    Packing,
    StripInstance,
    region_bounds,
    validate_packing,
)

__all__ = ["RenderStyle", "item_colour", "render_svg", "save_svg"]


@dataclass(frozen=True)
class RenderStyle:
    scale: int = 20
    margin: int = 10
    labels: bool = True
    show_profit: bool = False
    font_family: str = "Arial"
    font_size: int = 10
    region_fill: str = "#f4f4f4"
    stroke: str = "black"


def item_colour(item_id: str) -> str:
    """A pale colour that depends only on the item id."""
    digest = hashlib.md5(item_id.encode("utf-8")).digest()
    return "#{:02x}{:02x}{:02x}".format(*(128 + b // 2 for b in digest[:3]))


def render_svg(instance: Instance, packing: Packing, style: Optional[RenderStyle] = None) -> str:
    """
    Draw the region outline and one rectangle per placement.

    The y axis points up as in the packing coordinates. L-instances show both boxes
    of the L. Output depends only on the arguments.

    Raises:
        InfeasiblePackingError: the packing does not validate against the instance.
    """
    style = style or RenderStyle()
    report = validate_packing(instance, packing)
    if not report.feasible:
        raise InfeasiblePackingError(report)
    items = instance.item_map
    if isinstance(instance, StripInstance):
        region = instance.region(max(packing.top(items), region_bounds(packing.region).top))
    else:
        region = instance.region
    bounds = region_bounds(region)
    s, m = style.scale, style.margin
    width = bounds.right * s + 2 * m
    height = bounds.top * s + 2 * m

    def flip(y: int, h: int) -> int:
        return m + (bounds.top - y - h) * s

    dwg = svgwrite.Drawing(size=(width, height), profile="tiny")
    outline = dwg.g(id="region")
    for box in region:
        outline.add(
            dwg.rect(
                insert=(m + box.x * s, flip(box.y, box.height)),
                size=(box.width * s, box.height * s),
                fill=style.region_fill,
                stroke=style.stroke,
                stroke_width=2,
            )
        )
    dwg.add(outline)

    placed = dwg.g(id="items")
    for placement, rect in sorted(packing.rects(items), key=lambda pair: pair[0].item_id):
        x, y = m + rect.x * s, flip(rect.y, rect.height)
        placed.add(
            dwg.rect(
                insert=(x, y),
                size=(rect.width * s, rect.height * s),
                fill=item_colour(placement.item_id),
                stroke=style.stroke,
                stroke_width=1,
            )
        )
        if style.labels:
            label = placement.item_id
            if style.show_profit:
                label += f" ({items[placement.item_id].profit})"
            placed.add(
                dwg.text(
                    label,
                    insert=(x + 3, y + style.font_size + 2),
                    font_size=style.font_size,
                    font_family=style.font_family,
                )
            )
    dwg.add(placed)
    return dwg.tostring()


def save_svg(path: str, instance: Instance, packing: Packing, style: Optional[RenderStyle] = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(render_svg(instance, packing, style))
