"""Grammar node-type metadata.

Parses the node-types.json document emitted by the tree-sitter generator
into descriptors: one per node type, carrying subtype lists for supertypes
and child-slot structure for everything else.  Unknown object keys are
ignored so newer generator output (which adds "root"/"extra" markers) still
loads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from ..portable import FormatError

__all__ = ["TypeRef", "ChildSlot", "NodeTypeDescriptor", "parse_node_types"]


@dataclass(frozen=True)
class TypeRef:
    """A reference to another node type by grammar name."""

    type_name: str
    named: bool


@dataclass(frozen=True)
class ChildSlot:
    """Structure of one child position: its cardinality flags and the
    non-empty set of types that may fill it."""

    multiple: bool
    required: bool
    types: tuple[TypeRef, ...]


@dataclass(frozen=True)
class NodeTypeDescriptor:
    """One node type.  Exactly one shape applies: a supertype (subtypes set),
    an interior node (fields and/or children), or a terminal (neither)."""

    type_name: str
    named: bool
    subtypes: tuple[TypeRef, ...] | None = None
    fields: tuple[tuple[str, ChildSlot], ...] = ()
    children: ChildSlot | None = None

    @property
    def is_supertype(self) -> bool:
        return self.subtypes is not None

    @property
    def is_terminal(self) -> bool:
        return self.subtypes is None and not self.fields and self.children is None


def _require(condition: bool, message: str, path: str) -> None:
    if not condition:
        raise FormatError(message, path)


def _type_ref(obj: Any, path: str) -> TypeRef:
    _require(isinstance(obj, dict), "type reference must be an object", path)
    name = obj.get("type")
    _require(isinstance(name, str), "type reference needs a string type", f"{path}.type")
    named = obj.get("named")
    _require(isinstance(named, bool), "type reference needs a boolean named", f"{path}.named")
    return TypeRef(name, named)


def _child_slot(obj: Any, path: str) -> ChildSlot:
    _require(isinstance(obj, dict), "child slot must be an object", path)
    multiple = obj.get("multiple")
    _require(isinstance(multiple, bool), "slot needs a boolean multiple", f"{path}.multiple")
    required = obj.get("required")
    _require(isinstance(required, bool), "slot needs a boolean required", f"{path}.required")
    types = obj.get("types")
    _require(isinstance(types, list), "slot needs a types array", f"{path}.types")
    _require(len(types) > 0, "slot types must be non-empty", f"{path}.types")
    refs = tuple(_type_ref(t, f"{path}.types[{i}]") for i, t in enumerate(types))
    return ChildSlot(multiple, required, refs)


def parse_node_types(doc: str | bytes) -> list[NodeTypeDescriptor]:
    """Parse a node-types document.  Raises FormatError with the JSON path
    of the first violation."""
    try:
        data = json.loads(doc)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"not valid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}"
        ) from None
    _require(isinstance(data, list), "document must be an array of node types", "$")
    out: list[NodeTypeDescriptor] = []
    for i, entry in enumerate(data):
        path = f"$[{i}]"
        _require(isinstance(entry, dict), "node type must be an object", path)
        name = entry.get("type")
        _require(isinstance(name, str), "node type needs a string type", f"{path}.type")
        named = entry.get("named")
        _require(isinstance(named, bool), "node type needs a boolean named", f"{path}.named")

        subtypes: tuple[TypeRef, ...] | None = None
        if "subtypes" in entry:
            raw = entry["subtypes"]
            _require(isinstance(raw, list), "subtypes must be an array", f"{path}.subtypes")
            subtypes = tuple(
                _type_ref(s, f"{path}.subtypes[{j}]") for j, s in enumerate(raw)
            )

        fields: tuple[tuple[str, ChildSlot], ...] = ()
        if "fields" in entry:
            raw = entry["fields"]
            _require(isinstance(raw, dict), "fields must be an object", f"{path}.fields")
            fields = tuple(
                (fname, _child_slot(slot, f"{path}.fields.{fname}"))
                for fname, slot in raw.items()
            )

        children: ChildSlot | None = None
        if "children" in entry:
            children = _child_slot(entry["children"], f"{path}.children")

        _require(
            subtypes is None or (not fields and children is None),
            "a supertype cannot also declare fields or children",
            path,
        )
        out.append(NodeTypeDescriptor(name, named, subtypes, fields, children))
    return out
