"""Support runtime for generated typed-syntax modules.

Generated modules define one dataclass per node type plus decode tables;
everything generic lives here: the Ok-or-error child wrapper, the catch-all
token for anonymous nodes, the table record types, and the decoder that maps
an arbitrary Term onto the typed representation without ever failing.
"""
from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields, is_dataclass
from enum import Enum
from typing import Any, Generic, TypeVar

from ..syntax import ErrorStatus, SourceSpan, Term, child_terms, fold, iter_terms, term_text

T = TypeVar("T")


class Cardinality(Enum):
    ONE = "one"
    OPTIONAL = "optional"
    MANY = "many"


@dataclass(frozen=True)
class Err(Generic[T]):
    """Ok-or-error wrapper around every child position.

    ok holds the typed node when decoding succeeded; error holds the raw
    subtree when it did not (parse errors, missing nodes, unexpected kinds).
    Both None marks a hole: a required child the parser never produced.
    """

    ok: T | None = None
    error: Term | None = None

    @property
    def is_ok(self) -> bool:
        return self.ok is not None

    @property
    def is_hole(self) -> bool:
        return self.ok is None and self.error is None


@dataclass(frozen=True)
class Token:
    """Catch-all for anonymous nodes: punctuation, operators, keywords."""

    ann: SourceSpan
    text: str
    status: ErrorStatus = ErrorStatus.OK


@dataclass(frozen=True)
class SlotSpec:
    """Decode-time view of one child slot.

    field_name None is the positional children slot.  allowed is the set of
    concrete named kinds the slot admits (sums pre-expanded); allow_token
    additionally admits any anonymous node."""

    field_name: str | None
    attr: str
    cardinality: Cardinality
    allowed: frozenset[str]
    allow_token: bool = False


@dataclass(frozen=True)
class TerminalSpec:
    cls: type


@dataclass(frozen=True)
class ProductSpec:
    cls: type
    fields: tuple[SlotSpec, ...] = ()
    extra: SlotSpec | None = None


NodeSpec = TerminalSpec | ProductSpec


def _wrap(term: Term, value: Any) -> Err:
    if value is None:
        return Err(None, term)
    return Err(value, None)


def _accepts(kind: str, slot: SlotSpec, named_kinds: frozenset[str]) -> bool:
    if kind in slot.allowed:
        return True
    return slot.allow_token and kind not in named_kinds


def _consume(
    slot: SlotSpec,
    entries: list[tuple[Term, Any, str | None]],
    taken: list[bool],
    values: dict[str, Any],
    named_kinds: frozenset[str],
) -> None:
    matched = [
        i
        for i, (child, _, fname) in enumerate(entries)
        if not taken[i] and fname == slot.field_name and _accepts(child.kind, slot, named_kinds)
    ]
    if slot.cardinality is Cardinality.MANY:
        for i in matched:
            taken[i] = True
        values[slot.attr] = tuple(_wrap(entries[i][0], entries[i][1]) for i in matched)
    elif matched:
        i = matched[0]
        taken[i] = True
        values[slot.attr] = _wrap(entries[i][0], entries[i][1])
    elif slot.cardinality is Cardinality.OPTIONAL:
        values[slot.attr] = None
    else:
        values[slot.attr] = Err()  # required hole


def _build_product(
    term: Term,
    spec: ProductSpec,
    child_values: list[Any],
    named_kinds: frozenset[str],
) -> Any:
    field_of: dict[int, str] = {}
    for fname, group in term.fields:
        for child in group:
            field_of[id(child)] = fname
    entries = [
        (child, value, field_of.get(id(child)))
        for child, value in zip(child_terms(term), child_values)
    ]
    taken = [False] * len(entries)
    values: dict[str, Any] = {}
    for slot in spec.fields:
        _consume(slot, entries, taken, values, named_kinds)
    if spec.extra is not None:
        _consume(spec.extra, entries, taken, values, named_kinds)
    anon = tuple(
        _wrap(child, value) for (child, value, _), used in zip(entries, taken) if not used
    )
    return spec.cls(term.span, anon=anon, **values)


def decode_term(term: Term, specs: dict[str, NodeSpec], named_kinds: frozenset[str]) -> Err:
    """Decode any Term against the given tables.

    Total: nodes that cannot be represented in the typed world (parse
    errors, missing nodes, undeclared kinds) come back as the error
    alternative carrying the raw subtree, so no input is rejected and no
    span is lost.
    """

    def algebra(node: Term, child_values: list[Any]) -> Any:
        spec = specs.get(node.kind)
        if spec is None:
            if node.is_leaf and node.kind not in named_kinds:
                return Token(node.span, node.text or "", node.error)
            return None
        if node.error is not ErrorStatus.OK:
            return None
        if isinstance(spec, TerminalSpec):
            if node.is_leaf:
                return spec.cls(node.span, node.text or "", ())
            # terminal kind that grew children (aliases, recovery): keep them
            anon = tuple(
                _wrap(child, value)
                for child, value in zip(child_terms(node), child_values)
            )
            return spec.cls(node.span, term_text(node), anon)
        return _build_product(node, spec, child_values, named_kinds)

    return _wrap(term, fold(term, algebra))


def typed_spans(value: Any) -> list[SourceSpan]:
    """Every source span reachable from a decoded value, multiplicity kept.

    Used to check decoding against the original Term: the multiset of spans
    must survive the trip into the typed representation.
    """
    out: list[SourceSpan] = []
    stack = [value]
    while stack:
        item = stack.pop()
        if item is None or isinstance(item, (str, ErrorStatus)):
            continue
        if isinstance(item, SourceSpan):
            out.append(item)
        elif isinstance(item, Term):
            out.extend(t.span for t in iter_terms(item))
        elif isinstance(item, Err):
            stack.append(item.ok)
            stack.append(item.error)
        elif isinstance(item, Token):
            out.append(item.ann)
        elif isinstance(item, tuple):
            stack.extend(item)
        elif is_dataclass(item):
            for f in dataclass_fields(item):
                stack.append(getattr(item, f.name))
    return out
