"""Schema intermediate representation.

Sits between node-type metadata and emitted source: supertypes become sums,
interior nodes become products with cardinality-classified fields, leaves
become terminals.  Multi-typed slots get synthesized local sums; slots that
admit anonymous nodes route through the shared token terminal.
"""
from __future__ import annotations

import keyword
from dataclasses import dataclass

from .node_types import ChildSlot, NodeTypeDescriptor
from .runtime import Cardinality

__all__ = [
    "TOKEN_TYPE",
    "UnresolvedType",
    "FieldIR",
    "Terminal",
    "Product",
    "Sum",
    "SchemaEntry",
    "SchemaIR",
    "build_schema",
]

# Synthesized terminal standing in for every anonymous node type.
TOKEN_TYPE = "_token"

# Attribute names every generated datatype claims for itself.
_RESERVED_ATTRS = frozenset({"ann", "text", "anon", "children"})


class UnresolvedType(ValueError):
    """A slot or subtype list references a type the grammar never declares."""

    def __init__(self, name: str) -> None:
        super().__init__(f"reference to undeclared type {name!r}")
        self.name = name


@dataclass(frozen=True)
class FieldIR:
    """One child slot of a product.

    field_name is the grammar's name (None for the positional children
    slot); attr is the mangled attribute it maps to in emitted code."""

    field_name: str | None
    attr: str
    cardinality: Cardinality
    payload: str


@dataclass(frozen=True)
class Terminal:
    name: str


@dataclass(frozen=True)
class Product:
    name: str
    fields: tuple[FieldIR, ...] = ()
    extra: FieldIR | None = None


@dataclass(frozen=True)
class Sum:
    name: str
    alternatives: tuple[str, ...]
    synthesized: bool = False  # local slot sum rather than a declared supertype


SchemaEntry = Terminal | Product | Sum


@dataclass(frozen=True)
class SchemaIR:
    entries: tuple[SchemaEntry, ...]

    def entry_map(self) -> dict[str, SchemaEntry]:
        return {e.name: e for e in self.entries}

    def expansion(self, name: str) -> tuple[frozenset[str], bool]:
        """Concrete kinds behind a type name, plus whether it admits
        anonymous tokens.  Sums (nested included) are flattened."""
        entries = self.entry_map()
        concrete: set[str] = set()
        allow_token = False
        work = [name]
        seen: set[str] = set()
        while work:
            current = work.pop()
            if current in seen:
                continue
            seen.add(current)
            if current == TOKEN_TYPE:
                allow_token = True
                continue
            entry = entries[current]
            if isinstance(entry, Sum):
                work.extend(entry.alternatives)
            else:
                concrete.add(current)
        return frozenset(concrete), allow_token


def _attr_for(field_name: str) -> str:
    attr = "".join(c if c.isalnum() or c == "_" else "_" for c in field_name)
    if not attr or attr[0].isdigit():
        attr = f"f_{attr}"
    if keyword.iskeyword(attr) or attr in _RESERVED_ATTRS:
        attr = f"{attr}_"
    return attr


def _cardinality(slot: ChildSlot) -> Cardinality:
    if slot.multiple:
        return Cardinality.MANY
    return Cardinality.ONE if slot.required else Cardinality.OPTIONAL


class _Builder:
    def __init__(self, descriptors: list[NodeTypeDescriptor], synthesize_missing: bool) -> None:
        self.declared: dict[str, NodeTypeDescriptor] = {}
        for desc in descriptors:
            if not desc.named:
                continue  # anonymous entries are covered by the token terminal
            if desc.type_name in self.declared:
                raise ValueError(f"duplicate node type {desc.type_name!r}")
            self.declared[desc.type_name] = desc
        self.synthesize_missing = synthesize_missing
        self.names_in_use = set(self.declared)
        self.local_sums: list[Sum] = []
        self.missing: dict[str, None] = {}  # ordered set of synthesized terminals
        self.token_used = False

    def resolve(self, name: str) -> str:
        if name in self.declared or name in self.missing:
            return name
        if not self.synthesize_missing:
            raise UnresolvedType(name)
        self.missing[name] = None
        self.names_in_use.add(name)
        return name

    def slot_payload(self, owner: str, label: str, slot: ChildSlot) -> str:
        named: list[str] = []
        for ref in slot.types:
            if ref.named and ref.type_name not in named:
                named.append(ref.type_name)
        has_anon = any(not ref.named for ref in slot.types)
        for name in named:
            self.resolve(name)
        if not named:
            self.token_used = True
            return TOKEN_TYPE
        if len(named) == 1 and not has_anon:
            return named[0]
        alternatives = list(named)
        if has_anon:
            self.token_used = True
            alternatives.append(TOKEN_TYPE)
        sum_name = f"_{owner.lstrip('_')}_{label}"
        while sum_name in self.names_in_use:
            sum_name += "_"
        self.names_in_use.add(sum_name)
        self.local_sums.append(Sum(sum_name, tuple(alternatives), synthesized=True))
        return sum_name

    def field_ir(self, owner: str, field_name: str, slot: ChildSlot) -> FieldIR:
        payload = self.slot_payload(owner, field_name, slot)
        return FieldIR(field_name, _attr_for(field_name), _cardinality(slot), payload)

    def extra_ir(self, owner: str, slot: ChildSlot) -> FieldIR:
        payload = self.slot_payload(owner, "children", slot)
        return FieldIR(None, "children", _cardinality(slot), payload)


def build_schema(
    descriptors: list[NodeTypeDescriptor], *, synthesize_missing: bool = False
) -> SchemaIR:
    """Classify descriptors into schema entries.

    Raises UnresolvedType for references to undeclared types unless
    synthesize_missing is set, in which case stand-in terminals are added
    (some generators emit alias kinds without declaring them).
    """
    builder = _Builder(descriptors, synthesize_missing)
    entries: list[SchemaEntry] = []
    for name, desc in builder.declared.items():
        if desc.subtypes is not None:
            alternatives: list[str] = []
            for ref in desc.subtypes:
                if ref.named:
                    alternatives.append(builder.resolve(ref.type_name))
                elif TOKEN_TYPE not in alternatives:
                    builder.token_used = True
                    alternatives.append(TOKEN_TYPE)
            entries.append(Sum(name, tuple(alternatives)))
        elif desc.fields or desc.children is not None:
            fields = tuple(builder.field_ir(name, f, slot) for f, slot in desc.fields)
            extra = builder.extra_ir(name, desc.children) if desc.children else None
            entries.append(Product(name, fields, extra))
        else:
            entries.append(Terminal(name))
    entries.extend(builder.local_sums)
    entries.extend(Terminal(name) for name in builder.missing)
    if builder.token_used:
        entries.append(Terminal(TOKEN_TYPE))
    return SchemaIR(tuple(entries))
