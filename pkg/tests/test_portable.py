"""Delimited tree exchange format: canonical encoding, strict decoding,
round trips, and the s-expression printer."""
from __future__ import annotations

import json
import random

import pytest

from semascope.portable import (
    FormatError,
    decode_portable,
    encode_portable,
    term_from_obj,
    term_sexp,
    term_to_obj,
)
from semascope.syntax import ErrorStatus, SourceSpan, Term, ZERO_SPAN

from conftest import mutate, random_term


def span(a: int, b: int) -> SourceSpan:
    return SourceSpan(a, b, (0, a), (0, b))


SAMPLE = Term(
    "pair",
    span(0, 10),
    None,
    (("key", (Term("string", span(0, 3), '"a"'),)),),
    (Term("number", span(5, 6), "1"),),
)


def test_obj_shape():
    obj = term_to_obj(SAMPLE)
    assert obj["kind"] == "pair"
    assert obj["span"] == [0, 10, 0, 0, 0, 10]
    assert obj["error"] == "ok"
    assert obj["fields"] == [["key", [term_to_obj(SAMPLE.field("key")[0])]]]
    assert len(obj["children"]) == 1
    assert "text" not in obj  # interior nodes carry no text key


def test_encoding_is_compact_and_utf8():
    t = Term("word", span(0, 4), "héllo")
    doc = encode_portable(t)
    assert ": " not in doc and ", " not in doc
    assert "héllo" in doc  # not \u-escaped


def test_round_trip_exact():
    rng = random.Random(21)
    for _ in range(50):
        t = mutate(rng, random_term(rng, 80), rng.randint(0, 5))
        assert decode_portable(encode_portable(t)) == t


def test_round_trip_preserves_error_status():
    t = Term("stmt", span(0, 1), None, (), (Term("word", span(0, 1), "x"),),
             ErrorStatus.ERROR)
    back = decode_portable(encode_portable(t))
    assert back.error is ErrorStatus.ERROR


def test_decode_accepts_bytes():
    doc = encode_portable(SAMPLE).encode()
    assert decode_portable(doc) == SAMPLE


def test_encoding_deterministic():
    rng = random.Random(9)
    t = random_term(rng, 120)
    assert encode_portable(t) == encode_portable(t)


@pytest.mark.parametrize(
    "mangle",
    [
        lambda o: o.pop("kind"),
        lambda o: o.__setitem__("kind", 7),
        lambda o: o.__setitem__("span", [0, 1]),
        lambda o: o.__setitem__("span", [1, 0, [0, 1], [0, 0]]),
        lambda o: o.__setitem__("error", "bogus"),
        lambda o: o.__setitem__("fields", {"key": []}),
        lambda o: o.__setitem__("fields", [["key"]]),
        lambda o: o.__setitem__("children", "nope"),
    ],
)
def test_decode_rejects_malformed_nodes(mangle):
    obj = term_to_obj(SAMPLE)
    mangle(obj)
    with pytest.raises(FormatError):
        term_from_obj(obj)


def test_decode_rejects_leaf_with_children():
    obj = term_to_obj(SAMPLE)
    obj["text"] = "oops"  # now a leaf, but children remain
    with pytest.raises(FormatError):
        term_from_obj(obj)


def test_decode_rejects_non_json():
    with pytest.raises(FormatError):
        decode_portable("{not json")


def test_decode_error_paths_point_at_offender():
    obj = term_to_obj(SAMPLE)
    obj["fields"][0][1][0]["span"] = "bad"
    with pytest.raises(FormatError) as exc:
        term_from_obj(obj)
    assert "key" in str(exc.value) or "fields" in str(exc.value)


def test_decode_runs_structural_validation():
    # well-formed JSON, ill-formed tree: child span escapes the parent
    obj = {
        "kind": "node",
        "span": [0, 1, [0, 0], [0, 1]],
        "error": "ok",
        "fields": [],
        "children": [
            {"kind": "word", "span": [0, 9, [0, 0], [0, 9]], "error": "ok",
             "text": "long", "fields": [], "children": []}
        ],
    }
    with pytest.raises(FormatError):
        term_from_obj(obj)


def test_sexp_labels_and_quoting():
    text = term_sexp(SAMPLE)
    assert text.startswith("(pair")
    assert '"\\"a\\""' in text  # leaf text is JSON-quoted
    lines = text.splitlines()
    assert lines[1].startswith("  ")  # children indented two spaces


def test_sexp_marks_errors():
    t = Term("word", span(0, 1), "x", error=ErrorStatus.MISSING)
    assert "!missing" in term_sexp(t)
    u = Term("stmt", span(0, 1), None, (), (Term("word", span(0, 1), "x"),),
             ErrorStatus.ERROR)
    assert "!error" in term_sexp(u)


def test_sexp_deep_tree_no_recursion_error():
    t = Term("word", ZERO_SPAN, "x")
    for _ in range(4000):
        t = Term("wrap", ZERO_SPAN, None, (), (t,))
    out = term_sexp(t)
    assert out.count("wrap") == 4000


def test_obj_is_json_serializable_for_every_corpus_style_tree():
    rng = random.Random(2)
    for _ in range(10):
        t = random_term(rng, 50)
        json.dumps(term_to_obj(t))
