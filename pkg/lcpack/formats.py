# coding=utf-8
"""
Instance, packing and layout documents.

All three are YAML mappings. An instance document looks like::

    kind: knapsack        # knapsack | strip | lpack
    N: 10                 # W for strip; lpack also takes wL and hL
    rotations: false
    mode: weighted        # knapsack only: weighted | cardinality
    items:
      - {id: a, w: 3, h: 4, p: 5}
      - {id: b, w: 6, h: 2, p: 1, r: true}

Lengths and profits are integers; `p` defaults to 1 and `r` (rotatable) to
true. Errors point at the line of the offending item or field.
"""
from __future__ import annotations

import os
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml

from .containers import Layout
from .core import (
    Instance,
    InstanceError,
    Item,
    KnapsackInstance,
    LInstance,
    Packing,
    PackingMode,
    Placement,
    Region,
    StripInstance,
)

__all__ = [
    "INSTANCE_KINDS",
    "load_document",
    "parse_instance",
    "parse_instance_text",
    "instance_to_document",
    "serialize_instance",
    "parse_packing",
    "parse_packing_text",
    "packing_to_document",
    "serialize_packing",
    "parse_layout",
    "serialize_layout",
    "instance_kind",
]

INSTANCE_KINDS = ("knapsack", "strip", "lpack")
_ITEM_FIELDS = {"id", "w", "h", "p", "r"}


class _Lines:
    """Line numbers of the top-level keys and of each entry of one list."""

    def __init__(self, root: Optional[yaml.Node], list_key: str):
        self.keys: Dict[str, int] = {}
        self.entries: List[int] = []
        if not isinstance(root, yaml.MappingNode):
            return
        for key, value in root.value:
            name = str(key.value)
            self.keys[name] = key.start_mark.line + 1
            if name == list_key and isinstance(value, yaml.SequenceNode):
                self.entries = [entry.start_mark.line + 1 for entry in value.value]

    def entry(self, index: int) -> Optional[int]:
        return self.entries[index] if index < len(self.entries) else None


def load_document(text: str, source: str = "<string>") -> Tuple[Any, Optional[yaml.Node]]:
    """
    Parse YAML text into data plus its node tree.

    Raises:
        InstanceError: the text is not well-formed YAML.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as ex:
        mark = getattr(ex, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise InstanceError(f"{source}: malformed document ({getattr(ex, 'problem', ex)})", line=line) from ex
    return data, node


def _read(path: str) -> str:
    if not os.path.isfile(path):
        raise InstanceError(f"no such file: {path}")
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _integer(value: Any, field: str, line: Optional[int], item_id: Optional[str] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"expected an integer, got {value!r}", item_id=item_id, line=line, field=field)
    return value


def _flag(value: Any, field: str, line: Optional[int], item_id: Optional[str] = None) -> bool:
    if not isinstance(value, bool):
        raise InstanceError(f"expected true or false, got {value!r}", item_id=item_id, line=line, field=field)
    return value


def _parse_item(entry: Any, index: int, line: Optional[int]) -> Item:
    if not isinstance(entry, Mapping):
        raise InstanceError(f"item {index} must be a mapping", line=line, field="items")
    unknown = set(map(str, entry)) - _ITEM_FIELDS
    if unknown:
        raise InstanceError(f"unknown item fields: {', '.join(sorted(unknown))}", line=line, field="items")
    if "id" not in entry:
        raise InstanceError(f"item {index} has no id", line=line, field="id")
    item_id = str(entry["id"])
    for required in ("w", "h"):
        if required not in entry:
            raise InstanceError("missing field", item_id=item_id, line=line, field=required)
    width = _integer(entry["w"], "w", line, item_id)
    height = _integer(entry["h"], "h", line, item_id)
    profit = _integer(entry.get("p", 1), "p", line, item_id)
    rotatable = _flag(entry.get("r", True), "r", line, item_id)
    try:
        return Item(item_id, width, height, profit, rotatable)
    except InstanceError as ex:
        raise InstanceError(ex.message, item_id=item_id, line=line, field=ex.field) from ex


def parse_instance_text(text: str, source: str = "<string>") -> Instance:
    """
    Build an instance from the text of an instance document.

    Raises:
        InstanceError: malformed YAML, a missing or badly typed field, or an item
            the instance rejects (zero side, negative profit, no fitting orientation).
    """
    data, node = load_document(text, source)
    lines = _Lines(node, "items")
    if not isinstance(data, Mapping):
        raise InstanceError(f"{source}: expected a mapping at the top level", line=1)
    kind = data.get("kind")
    if kind not in INSTANCE_KINDS:
        raise InstanceError(
            f"kind must be one of {', '.join(INSTANCE_KINDS)}, got {kind!r}",
            line=lines.keys.get("kind"),
            field="kind",
        )
    entries = data.get("items", [])
    if entries is None:
        entries = []
    if not isinstance(entries, list):
        raise InstanceError("items must be a list", line=lines.keys.get("items"), field="items")
    items = [_parse_item(entry, index, lines.entry(index)) for index, entry in enumerate(entries)]
    item_lines = {item.id: lines.entry(index) for index, item in enumerate(items)}

    def number(name: str) -> int:
        if name not in data:
            raise InstanceError(f"{kind} instances need {name}", field=name)
        return _integer(data[name], name, lines.keys.get(name))

    rotations = _flag(data.get("rotations", False), "rotations", lines.keys.get("rotations"))
    try:
        if kind == "knapsack":
            mode = data.get("mode", PackingMode.WEIGHTED.value)
            try:
                packing_mode = PackingMode(mode)
            except ValueError as ex:
                raise InstanceError(f"unknown mode {mode!r}", line=lines.keys.get("mode"), field="mode") from ex
            return KnapsackInstance(number("N"), tuple(items), packing_mode, rotations)
        if kind == "strip":
            return StripInstance(number("W"), tuple(items), rotations)
        if rotations:
            raise InstanceError("lpack instances do not rotate", line=lines.keys.get("rotations"), field="rotations")
        N = number("N")
        return LInstance.from_items(N, number("wL"), number("hL"), items)
    except InstanceError as ex:
        if ex.line is not None or ex.item_id is None:
            raise
        raise InstanceError(
            ex.message, item_id=ex.item_id, line=item_lines.get(ex.item_id), field=ex.field
        ) from ex


def parse_instance(path: str) -> Instance:
    """Read an instance document from `path`."""
    return parse_instance_text(_read(path), path)


def instance_kind(instance: Instance) -> str:
    if isinstance(instance, KnapsackInstance):
        return "knapsack"
    if isinstance(instance, StripInstance):
        return "strip"
    return "lpack"


def _item_document(item: Item) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"id": item.id, "w": item.width, "h": item.height, "p": item.profit}
    if not item.rotatable:
        doc["r"] = False
    return doc


def instance_to_document(instance: Instance) -> Dict[str, Any]:
    kind = instance_kind(instance)
    doc: Dict[str, Any] = {"kind": kind}
    if isinstance(instance, KnapsackInstance):
        doc["N"] = instance.N
        doc["rotations"] = instance.rotations
        doc["mode"] = instance.mode.value
    elif isinstance(instance, StripInstance):
        doc["W"] = instance.W
        doc["rotations"] = instance.rotations
    else:
        doc.update({"N": instance.N, "wL": instance.w_L, "hL": instance.h_L})
    doc["items"] = [_item_document(item) for item in instance.items]
    return doc


def _dump(doc: Mapping[str, Any]) -> str:
    return yaml.safe_dump(dict(doc), sort_keys=False, default_flow_style=None, allow_unicode=True)


def serialize_instance(instance: Instance) -> str:
    return _dump(instance_to_document(instance))


def _packing_region(instance: Instance, height: Optional[int], placements: Tuple[Placement, ...]) -> Region:
    if not isinstance(instance, StripInstance):
        return instance.region
    if height is None:
        height = Packing(placements, instance.region(0)).top(instance.item_map)
    return instance.region(height)


def parse_packing_text(text: str, instance: Instance, source: str = "<string>") -> Packing:
    """
    Build a packing for `instance` from a packing document::

        height: 4            # strip packings only, optional
        placements:
          - {id: a, x: 0, y: 0}
          - {id: b, x: 3, y: 0, rot: true}

    Item ids are not checked here; validate_packing reports unknown ones.
    """
    data, node = load_document(text, source)
    lines = _Lines(node, "placements")
    if not isinstance(data, Mapping) or not isinstance(data.get("placements", []), list):
        raise InstanceError(f"{source}: expected a mapping with a 'placements' list", line=1)
    placements = []
    for index, entry in enumerate(data.get("placements") or []):
        line = lines.entry(index)
        if not isinstance(entry, Mapping) or "id" not in entry:
            raise InstanceError(f"placement {index} needs an id", line=line, field="placements")
        item_id = str(entry["id"])
        placements.append(
            Placement(
                item_id,
                _integer(entry.get("x"), "x", line, item_id),
                _integer(entry.get("y"), "y", line, item_id),
                _flag(entry.get("rot", False), "rot", line, item_id),
            )
        )
    height = data.get("height")
    if height is not None:
        height = _integer(height, "height", lines.keys.get("height"))
    placements_tuple = tuple(placements)
    return Packing(placements_tuple, _packing_region(instance, height, placements_tuple))


def parse_packing(path: str, instance: Instance) -> Packing:
    return parse_packing_text(_read(path), instance, path)


def packing_to_document(
    instance: Instance, packing: Packing, extra: Optional[Mapping[str, Any]] = None
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"kind": instance_kind(instance)}
    if isinstance(instance, StripInstance):
        doc["height"] = packing.top(instance.item_map)
    else:
        doc["profit"] = packing.profit(instance.item_map)
    if extra:
        doc.update(extra)
    rows = []
    for placement in packing.placements:
        row: Dict[str, Any] = {"id": placement.item_id, "x": placement.x, "y": placement.y}
        if placement.rotated:
            row["rot"] = True
        rows.append(row)
    doc["placements"] = rows
    return doc


def serialize_packing(
    instance: Instance, packing: Packing, extra: Optional[Mapping[str, Any]] = None
) -> str:
    return _dump(packing_to_document(instance, packing, extra))


def parse_layout(path: str, region: Region) -> Layout:
    """Read a `{containers: [...]}` layout document."""
    data, _ = load_document(_read(path), path)
    return Layout.from_document(data, region)


def serialize_layout(layout: Layout) -> str:
    return _dump(layout.to_document())
