"""Patch renderings: canonical JSON round trip, unified diff soundness
against git apply, and the s-expression view."""
from __future__ import annotations

import json
import subprocess
from pathlib import Path

import pytest

from semascope.diff import (
    DeleteNode,
    InsertNode,
    SpanOutOfBounds,
    apply_patch,
    diff_terms,
    iter_patch,
    parse_patch_json,
    patch_from_obj,
    patch_is_identity,
    patch_sexp,
    patch_to_obj,
    render_git_patch,
    render_json,
)
from semascope.portable import FormatError
from semascope.parsing import parse_source
from semascope.syntax import Side

from conftest import corpus_pairs

PAIRS = corpus_pairs()
IDS = [case for case, _, _, _ in PAIRS]


def _diff(registry, language, before, after):
    lang = registry.language(language)
    tb = parse_source(lang, before)
    ta = parse_source(lang, after)
    return diff_terms(tb, ta, lang.diff_options())


def test_json_keys_and_structure(registry):
    patch = _diff(registry, "json", b'{"a": 1}', b'{"a": 2}')
    obj = patch_to_obj(patch)
    assert obj["op"] == "copy"
    assert set(obj) >= {"op", "kind", "before_span", "after_span", "fields", "children"}
    doc = render_json(patch)
    assert json.loads(doc) == obj
    assert ": " not in doc.split('"text"')[0]  # compact separators


@pytest.mark.parametrize("case,language,before,after", PAIRS, ids=IDS)
def test_patch_json_round_trip(registry, case, language, before, after):
    patch = _diff(registry, language, before, after)
    doc = render_json(patch)
    back = parse_patch_json(doc)
    # the round trip must preserve both projections and re-render identically
    assert apply_patch(back, Side.BEFORE) == apply_patch(patch, Side.BEFORE)
    assert apply_patch(back, Side.AFTER) == apply_patch(patch, Side.AFTER)
    assert render_json(back) == doc


def test_patch_from_obj_rejects_garbage():
    with pytest.raises(FormatError):
        patch_from_obj({"op": "teleport"})
    with pytest.raises(FormatError):
        patch_from_obj([])
    with pytest.raises(FormatError):
        parse_patch_json("{broken")


def git_apply(tmp_path: Path, name: str, before: bytes, patch_text: str,
              zero_context: bool = False) -> bytes:
    """Apply a unified diff with git and return the patched bytes."""
    target = tmp_path / name
    target.write_bytes(before)
    patch_file = tmp_path / "change.patch"
    patch_file.write_bytes(patch_text.encode())
    cmd = ["git", "apply", "--whitespace=nowarn"]
    if zero_context:
        cmd.append("--unidiff-zero")
    subprocess.run(cmd + [str(patch_file)], cwd=tmp_path, check=True,
                   capture_output=True)
    return target.read_bytes()


@pytest.mark.parametrize("case,language,before,after", PAIRS, ids=IDS)
def test_git_patch_applies(registry, tmp_path, case, language, before, after):
    patch = _diff(registry, language, before, after)
    text = render_git_patch(
        patch, before, after, before_label="a/target", after_label="b/target"
    )
    if before == after:
        assert text == ""
        return
    if not text:
        # structurally identical change (formatting only): nothing to apply,
        # but then the renderer must be claiming byte equality falsely only
        # when the tree is unchanged
        assert patch_is_identity(patch)
        return
    assert git_apply(tmp_path, "target", before, text) == after


def test_patch_text_headers_and_hunks(registry):
    before = b'{"a": 1, "b": 2}\n'
    after = b'{"a": 1, "b": 3}\n'
    patch = _diff(registry, "json", before, after)
    text = render_git_patch(patch, before, after,
                            before_label="a/cfg.json", after_label="b/cfg.json")
    lines = text.splitlines()
    assert lines[0] == "--- a/cfg.json"
    assert lines[1] == "+++ b/cfg.json"
    assert lines[2].startswith("@@ -")
    assert any(l.startswith("-") for l in lines[2:])
    assert any(l.startswith("+") for l in lines[2:])


def test_context_width_zero(registry, tmp_path):
    before = b"\n".join(b"line %d" % i for i in range(20)) + b"\n"
    after = before.replace(b"line 10", b"line ten")
    # parse as python: every line is an expression statement
    patch = _diff(registry, "python", before, after)
    text = render_git_patch(patch, before, after, context=0,
                            before_label="a/f.py", after_label="b/f.py")
    assert git_apply(tmp_path, "f.py", before, text, zero_context=True) == after
    body = [l for l in text.splitlines()[2:] if not l.startswith("@@")]
    assert all(l.startswith(("+", "-", "\\")) for l in body)


def test_negative_context_rejected(registry):
    patch = _diff(registry, "json", b"1", b"2")
    with pytest.raises(ValueError):
        render_git_patch(patch, b"1", b"2", context=-1)


def test_span_bounds_enforced(registry):
    before = b'{"key": 123}'
    after = b'{"key": 124}'
    patch = _diff(registry, "json", before, after)
    with pytest.raises(SpanOutOfBounds):
        render_git_patch(patch, before[:4], after)


def test_no_trailing_newline_marker(registry, tmp_path):
    before = b'{"n": 1}'
    after = b'{"n": 2}'  # neither ends with a newline
    patch = _diff(registry, "json", before, after)
    text = render_git_patch(patch, before, after,
                            before_label="a/x.json", after_label="b/x.json")
    assert "\\ No newline at end of file" in text
    assert git_apply(tmp_path, "x.json", before, text) == after


def test_sexp_view_mentions_ops(registry):
    patch = _diff(registry, "json", b'{"a": 1}', b'{"a": 1, "b": 2}')
    text = patch_sexp(patch)
    assert "(insert" in text
    assert text.startswith("(copy")


def test_sexp_marks_moves(registry):
    before = b"def alpha():\n    return 11\n\ndef beta():\n    return 22\n"
    after = b"def beta():\n    return 22\n\ndef alpha():\n    return 11\n"
    patch = _diff(registry, "python", before, after)
    moved = [n for n in iter_patch(patch)
             if isinstance(n, (InsertNode, DeleteNode)) and n.moved]
    text = patch_sexp(patch)
    if moved:
        assert "moved" in text
