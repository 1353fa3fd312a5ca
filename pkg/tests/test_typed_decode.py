"""Decoding parse trees into the generated typed classes: totality over
broken input and span preservation."""
from __future__ import annotations

from collections import Counter

import pytest

from semascope.codegen.runtime import Err, Token, typed_spans
from semascope.generated import json_syntax
from semascope.parsing import parse_source
from semascope.syntax import ErrorStatus, iter_terms


def decode(json_lang, source: bytes):
    term = parse_source(json_lang, source)
    return term, json_syntax.decode(term)


def test_document_shape(json_lang):
    _, result = decode(json_lang, b'{"a": 1}')
    assert isinstance(result, Err) and result.is_ok
    doc = result.ok
    assert isinstance(doc, json_syntax.Document)
    obj = doc.children.ok
    assert isinstance(obj, json_syntax.Object)
    (pair_err,) = obj.children
    pair = pair_err.ok
    assert isinstance(pair, json_syntax.Pair)
    assert isinstance(pair.key.ok, json_syntax.String)
    assert isinstance(pair.value.ok, json_syntax.Number)
    assert pair.value.ok.text == "1"


def test_key_sum_admits_numbers(json_lang):
    _, result = decode(json_lang, b'{1: "one"}')
    pair = result.ok.children.ok.children[0].ok
    assert isinstance(pair.key.ok, json_syntax.Number)


def test_array_children_err_wrapped(json_lang):
    _, result = decode(json_lang, b"[1, true, null]")
    arr = result.ok.children.ok
    assert isinstance(arr, json_syntax.Array)
    kinds = [type(e.ok) for e in arr.children]
    assert kinds == [json_syntax.Number, json_syntax.True_, json_syntax.Null]
    assert all(e.is_ok for e in arr.children)


def test_punctuation_lands_in_anon_tokens(json_lang):
    _, result = decode(json_lang, b"[1]")
    arr = result.ok.children.ok
    anon_texts = [e.ok.text for e in arr.anon if isinstance(e.ok, Token)]
    assert anon_texts == ["[", "]"]


def test_broken_input_decodes_without_raising(json_lang):
    term, result = decode(json_lang, b'{"a": }')
    assert isinstance(result, Err)
    # somewhere inside there is a non-ok wrapper carrying the raw subtree
    def walk(value, acc):
        if isinstance(value, Err):
            if not value.is_ok:
                acc.append(value)
            walk(value.ok, acc)
            walk(value.error, acc)
        elif isinstance(value, tuple):
            for v in value:
                walk(v, acc)
        elif hasattr(value, "__dataclass_fields__") and not isinstance(value, Token):
            for name in value.__dataclass_fields__:
                walk(getattr(value, name), acc)

    bad: list[Err] = []
    walk(result, bad)
    assert bad


def test_hole_for_absent_required_field(json_lang):
    # "{1}" parses the key but no colon or value: pair.value has no carrier
    term, result = decode(json_lang, b"{1}")
    pairs = []

    def find(value):
        if isinstance(value, json_syntax.Pair):
            pairs.append(value)
        if isinstance(value, Err):
            find(value.ok)
            find(value.error)
        elif isinstance(value, tuple):
            for v in value:
                find(v)
        elif hasattr(value, "__dataclass_fields__") and not isinstance(value, Token):
            for name in value.__dataclass_fields__:
                find(getattr(value, name))

    find(result)
    if pairs:  # grammar may instead wrap the whole pair in an error
        holes = [p.value for p in pairs if p.value.is_hole]
        assert holes or any(not p.value.is_ok for p in pairs)


SPAN_SOURCES = [
    b"{}",
    b"[]",
    b"",
    b'{"a": 1, "b": [true, false, null, 1.5e-3]}',
    b'{"nested": {"deep": [{"x": 1}]}}',
    b'"just a string"',
    b'{"a": }',        # parse error
    b"[1, 2",          # truncated
    b"{1}",            # missing value
    b"not json at all",
]


@pytest.mark.parametrize("source", SPAN_SOURCES, ids=[repr(s) for s in SPAN_SOURCES])
def test_span_multiset_preserved(json_lang, source):
    term = parse_source(json_lang, source)
    result = json_syntax.decode(term)
    assert Counter(typed_spans(result)) == Counter(t.span for t in iter_terms(term))


def test_token_statuses_surface(json_lang):
    term = parse_source(json_lang, b"[1, 2")
    result = json_syntax.decode(term)
    # the missing "]" shows up as a zero-width token or an error wrapper;
    # either way no status silently vanishes
    statuses = set()

    def collect(value):
        if isinstance(value, Token):
            statuses.add(value.status)
        elif isinstance(value, Err):
            collect(value.ok)
            collect(value.error)
        elif isinstance(value, tuple):
            for v in value:
                collect(v)
        elif hasattr(value, "__dataclass_fields__"):
            for name in value.__dataclass_fields__:
                v = getattr(value, name)
                if name != "ann":
                    collect(v)

    collect(result)
    term_statuses = {t.error for t in iter_terms(term)}
    if ErrorStatus.MISSING in term_statuses:
        assert ErrorStatus.MISSING in statuses or not result.is_ok


def test_decode_err_repr_is_informative(json_lang):
    _, result = decode(json_lang, b"[1]")
    assert result.is_ok and not result.is_hole
    hole = Err()
    assert hole.is_hole and not hole.is_ok
