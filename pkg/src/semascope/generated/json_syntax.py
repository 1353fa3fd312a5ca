"""Typed syntax for the json grammar.

Generated module: regenerate with the `generate` command after a
grammar upgrade instead of editing by hand.
"""
from __future__ import annotations

from dataclasses import dataclass

from semascope.codegen.runtime import (
    Cardinality,
    Err,
    ProductSpec,
    SlotSpec,
    TerminalSpec,
    decode_term,
)
from semascope.syntax import SourceSpan, Term


__all__ = [
    'Array',
    'Document',
    'EscapeSequence',
    'False_',
    'Null',
    'Number',
    'Object',
    'Pair',
    'PairKey',
    'String',
    'StringContent',
    'True_',
    'Value',
    'decode',
]


@dataclass(frozen=True)
class Array:
    ann: SourceSpan
    children: tuple[Err[Value], ...]
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class Document:
    ann: SourceSpan
    children: Err[Value]
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class Object:
    ann: SourceSpan
    children: tuple[Err[Pair], ...]
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class Pair:
    ann: SourceSpan
    key: Err[PairKey]
    value: Err[Value]
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class String:
    ann: SourceSpan
    children: Err[StringContent] | None
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class StringContent:
    ann: SourceSpan
    children: tuple[Err[EscapeSequence], ...]
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class EscapeSequence:
    ann: SourceSpan
    text: str
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class False_:
    ann: SourceSpan
    text: str
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class Null:
    ann: SourceSpan
    text: str
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class Number:
    ann: SourceSpan
    text: str
    anon: tuple[Err, ...]


@dataclass(frozen=True)
class True_:
    ann: SourceSpan
    text: str
    anon: tuple[Err, ...]


Value = Array | False_ | Null | Number | Object | String | True_
PairKey = Number | String


NAMED_KINDS = frozenset({
    '_value',
    'array',
    'document',
    'escape_sequence',
    'false',
    'null',
    'number',
    'object',
    'pair',
    'string',
    'string_content',
    'true',
})

NODE_SPECS: dict[str, TerminalSpec | ProductSpec] = {
    'array': ProductSpec(
        Array,
        (),
        SlotSpec(None, 'children', Cardinality.MANY, frozenset({
            'array',
            'false',
            'null',
            'number',
            'object',
            'string',
            'true',
        })),
    ),
    'document': ProductSpec(
        Document,
        (),
        SlotSpec(None, 'children', Cardinality.ONE, frozenset({
            'array',
            'false',
            'null',
            'number',
            'object',
            'string',
            'true',
        })),
    ),
    'object': ProductSpec(
        Object,
        (),
        SlotSpec(None, 'children', Cardinality.MANY, frozenset({'pair'})),
    ),
    'pair': ProductSpec(
        Pair,
        (
            SlotSpec('key', 'key', Cardinality.ONE, frozenset({'number', 'string'})),
            SlotSpec('value', 'value', Cardinality.ONE, frozenset({
                'array',
                'false',
                'null',
                'number',
                'object',
                'string',
                'true',
            })),
        ),
        None,
    ),
    'string': ProductSpec(
        String,
        (),
        SlotSpec(None, 'children', Cardinality.OPTIONAL, frozenset({'string_content'})),
    ),
    'string_content': ProductSpec(
        StringContent,
        (),
        SlotSpec(None, 'children', Cardinality.MANY, frozenset({'escape_sequence'})),
    ),
    'escape_sequence': TerminalSpec(EscapeSequence),
    'false': TerminalSpec(False_),
    'null': TerminalSpec(Null),
    'number': TerminalSpec(Number),
    'true': TerminalSpec(True_),
}


def decode(term: Term) -> Err:
    """Decode a Term parsed under this grammar into the typed classes."""
    return decode_term(term, NODE_SPECS, NAMED_KINDS)
