"""Grammar-backed parsing: spans, fields, error tolerance, totality."""
from __future__ import annotations

import concurrent.futures
import random

import pytest

from semascope.backend import BackendUnavailable
from semascope.languages import GrammarBackend, LanguageDescriptor
from semascope.parsing import parse_source, parse_text
from semascope.syntax import (
    ErrorStatus,
    Term,
    count_terms,
    iter_terms,
    term_text,
    validate_term,
)


def test_rejects_str_source(json_lang):
    with pytest.raises(TypeError):
        parse_source(json_lang, "not bytes")


def test_parse_text_convenience(json_lang):
    t = parse_text(json_lang, "[1, 2]")
    assert t.kind == "document"
    assert validate_term(t) is None


def test_json_structure(json_lang):
    t = parse_source(json_lang, b'{"a": 1}')
    assert t.kind == "document"
    obj = t.children[0] if t.children else t.field("children")
    kinds = {n.kind for n in iter_terms(t)}
    assert {"object", "pair", "string", "number"} <= kinds


def test_field_names_carried(json_lang):
    t = parse_source(json_lang, b'{"a": 1}')
    pair = next(n for n in iter_terms(t) if n.kind == "pair")
    assert pair.field("key")
    assert pair.field("value")
    assert pair.field("key")[0].kind == "string"
    assert pair.field("value")[0].kind == "number"


def test_spans_cover_source(json_lang):
    src = b'{"alpha": [1, 2, 3]}'
    t = parse_source(json_lang, src)
    assert t.span.start_byte == 0
    assert t.span.end_byte == len(src)
    for node in iter_terms(t):
        assert 0 <= node.span.start_byte <= node.span.end_byte <= len(src)


def test_leaf_text_matches_source_slice(json_lang):
    src = b'{"alpha": 42}'
    t = parse_source(json_lang, src)
    for node in iter_terms(t):
        if node.is_leaf and node.error is ErrorStatus.OK:
            assert node.text == src[node.span.start_byte:node.span.end_byte].decode()


def test_python_multiline_points(python_lang):
    src = b"def f():\n    return 1\n"
    t = parse_source(python_lang, src)
    ret = next(n for n in iter_terms(t) if n.kind == "return_statement")
    assert ret.span.start_point == (1, 4)


def test_error_nodes_flagged_not_fatal(json_lang):
    t = parse_source(json_lang, b'{"a": }')
    statuses = {n.error for n in iter_terms(t)}
    assert ErrorStatus.ERROR in statuses or ErrorStatus.MISSING in statuses
    validate_term(t)


def test_missing_nodes_are_zero_width(python_lang):
    t = parse_source(python_lang, b"def f(:\n    pass\n")
    missing = [n for n in iter_terms(t) if n.error is ErrorStatus.MISSING]
    for node in missing:
        assert node.span.start_byte == node.span.end_byte


def test_empty_source(json_lang, python_lang):
    for lang in (json_lang, python_lang):
        t = parse_source(lang, b"")
        assert count_terms(t) >= 1
        validate_term(t)


def test_non_utf8_bytes_survive(python_lang):
    t = parse_source(python_lang, b"x = '\xff\xfe'\n")
    validate_term(t)
    assert "x" in term_text(t)


def test_random_bytes_fuzz_small(json_lang, python_lang):
    rng = random.Random(77)
    for lang in (json_lang, python_lang):
        for _ in range(150):
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 120)))
            t = parse_source(lang, blob)
            validate_term(t)


def test_deeply_nested_within_budget(json_lang):
    depth = 2000
    src = b"[" * depth + b"1" + b"]" * depth
    t = parse_source(json_lang, src)
    validate_term(t)


def test_concurrent_parsing(python_lang):
    src = b"def f(x):\n    return x * 2\n"
    expected = parse_source(python_lang, src)
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: parse_source(python_lang, src), range(64)))
    assert all(r == expected for r in results)


def test_repeated_parses_identical(json_lang):
    src = b'{"k": [true, null, 1.5e3]}'
    assert parse_source(json_lang, src) == parse_source(json_lang, src)


def test_missing_library_reports_backend_error(tmp_path, monkeypatch):
    monkeypatch.setenv("SEMASCOPE_GRAMMAR_DIR", str(tmp_path))
    ghost = LanguageDescriptor(
        language_id="ghost",
        file_extensions=(".gh",),
        backend=GrammarBackend("ghost.so", "tree_sitter_ghost"),
    )
    with pytest.raises(BackendUnavailable):
        parse_source(ghost, b"anything")
