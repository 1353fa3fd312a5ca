"""Change summaries: declaration-level tables of contents over patches."""
from __future__ import annotations

import pytest

from semascope.diff import diff_terms
from semascope.parsing import parse_source
from semascope.summary import (
    Change,
    DeclarationRule,
    TocEntry,
    declaration_name,
    entry_text,
    entry_to_obj,
    table_of_contents,
)


def toc(python_lang, before: bytes, after: bytes, **kw) -> list[TocEntry]:
    tb = parse_source(python_lang, before)
    ta = parse_source(python_lang, after)
    patch = diff_terms(tb, ta, python_lang.diff_options())
    return table_of_contents(patch, python_lang.declaration_rules, "m.py", **kw)


def test_modified_function(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def foo():\n    return 2\n")
    assert [(e.change, e.category, e.name) for e in entries] == [
        (Change.MODIFIED, "function", "foo")
    ]


def test_added_function(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def foo():\n    return 1\n\ndef bar():\n    return 9\n")
    assert [(e.change, e.name) for e in entries] == [(Change.ADDED, "bar")]


def test_removed_function(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n\ndef bar():\n    return 9\n",
                  b"def foo():\n    return 1\n")
    assert [(e.change, e.name) for e in entries] == [(Change.REMOVED, "bar")]


def test_unchanged_file_is_empty(python_lang):
    src = b"def foo():\n    return 1\n"
    assert toc(python_lang, src, src) == []


def test_whitespace_only_change_is_empty(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def foo():\n\n    return 1\n")
    assert entries == []


def test_rename_reports_removed_and_added(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def bar():\n    return 1\n")
    changes = {(e.change, e.name) for e in entries}
    assert changes == {(Change.REMOVED, "foo"), (Change.ADDED, "bar")}


def test_class_and_method_categories(python_lang):
    entries = toc(python_lang,
                  b"class A:\n    def m(self):\n        return 1\n",
                  b"class A:\n    def m(self):\n        return 2\n")
    # innermost declaration wins without include_enclosing
    assert [(e.change, e.category, e.name) for e in entries] == [
        (Change.MODIFIED, "function", "m")
    ]


def test_include_enclosing_adds_outer_declarations(python_lang):
    entries = toc(python_lang,
                  b"class A:\n    def m(self):\n        return 1\n",
                  b"class A:\n    def m(self):\n        return 2\n",
                  include_enclosing=True)
    got = {(e.change, e.category, e.name) for e in entries}
    assert got == {
        (Change.MODIFIED, "class", "A"),
        (Change.MODIFIED, "function", "m"),
    }


def test_module_level_change_without_declaration(python_lang):
    # top-level statements carry no declaration; nothing to report
    entries = toc(python_lang, b"x = 1\n", b"x = 2\n")
    categories = {e.category for e in entries}
    assert "function" not in categories and "class" not in categories


def test_entries_sorted_by_position(python_lang):
    before = b"def a():\n    return 1\n\ndef b():\n    return 2\n"
    after = b"def a():\n    return 10\n\ndef b():\n    return 20\n"
    entries = toc(python_lang, before, after)
    assert [e.name for e in entries] == ["a", "b"]
    starts = [e.span.start_byte for e in entries]
    assert starts == sorted(starts)


def test_entry_text_format(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def foo():\n    return 2\n")
    assert entry_text(entries[0]) == "modified function foo (m.py:1)"


def test_entry_obj_round_trippable_shape(python_lang):
    entries = toc(python_lang,
                  b"def foo():\n    return 1\n",
                  b"def foo():\n    return 2\n")
    obj = entry_to_obj(entries[0])
    assert obj == {
        "file": "m.py",
        "category": "function",
        "name": "foo",
        "change": "modified",
        "span": list(entries[0].span.as_tuple()),
    }


def test_unresolvable_name_paths_read_anonymous(python_lang):
    term = parse_source(python_lang, b"def foo():\n    return 1\n")
    assert declaration_name(term, ("no_such_field",)) == "<anonymous>"
    assert declaration_name(term, ("name",)) == "<anonymous>"  # module has no name
    from semascope.syntax import iter_terms

    func = next(t for t in iter_terms(term) if t.kind == "function_definition")
    assert declaration_name(func, ("name",)) == "foo"
