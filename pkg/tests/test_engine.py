"""Tree diffing: patch construction, projection round trips, keyed
reconciliation, and move detection."""
from __future__ import annotations

import random

import pytest

from semascope.diff import (
    CopyNode,
    DeleteNode,
    DiffOptions,
    InsertNode,
    MissingKeyField,
    ReplaceNode,
    apply_patch,
    diff_keyed,
    diff_terms,
    iter_patch,
    match_moves,
    patch_is_identity,
)
from semascope.syntax import Side, Term, ZERO_SPAN

from conftest import mutate, random_term


def leaf(kind: str, text: str) -> Term:
    return Term(kind, ZERO_SPAN, text)


def node(kind: str, *children: Term, **fields) -> Term:
    named = tuple((k, v if isinstance(v, tuple) else (v,)) for k, v in fields.items())
    return Term(kind, ZERO_SPAN, None, named, tuple(children))


def pair(key: str, value: str) -> Term:
    return node("pair", key=leaf("string", key), value=leaf("number", value))


def obj(*pairs: Term) -> Term:
    return node("object", *pairs)


def test_identity_patch():
    t = node("module", leaf("word", "a"), node("stmt", leaf("word", "b")))
    patch = diff_terms(t, t)
    assert patch_is_identity(patch)
    assert apply_patch(patch, Side.BEFORE) == t
    assert apply_patch(patch, Side.AFTER) == t


def test_leaf_text_change_is_replace():
    before = node("stmt", leaf("number", "1"))
    after = node("stmt", leaf("number", "2"))
    patch = diff_terms(before, after)
    kinds = [type(n).__name__ for n in iter_patch(patch)]
    assert kinds == ["CopyNode", "ReplaceNode"]
    assert not patch_is_identity(patch)


def test_root_kind_mismatch_is_replace():
    before = leaf("number", "1")
    after = leaf("string", '"1"')
    patch = diff_terms(before, after)
    assert isinstance(patch, ReplaceNode)
    assert apply_patch(patch, Side.BEFORE) == before
    assert apply_patch(patch, Side.AFTER) == after


def test_sequence_insert_minimal():
    before = node("block", leaf("word", "x"), leaf("word", "z"))
    after = node("block", leaf("word", "x"), leaf("word", "y"), leaf("word", "z"))
    patch = diff_terms(before, after)
    inserts = [n for n in iter_patch(patch) if isinstance(n, InsertNode)]
    deletes = [n for n in iter_patch(patch) if isinstance(n, DeleteNode)]
    assert len(inserts) == 1 and not deletes
    assert inserts[0].term.text == "y"
    assert inserts[0].after_index == 1


def test_sequence_delete_minimal():
    before = node("block", leaf("word", "x"), leaf("word", "y"), leaf("word", "z"))
    after = node("block", leaf("word", "x"), leaf("word", "z"))
    patch = diff_terms(before, after)
    deletes = [n for n in iter_patch(patch) if isinstance(n, DeleteNode)]
    assert len(deletes) == 1
    assert deletes[0].term.text == "y"
    assert deletes[0].before_index == 1


def test_similar_nodes_pair_and_refine():
    # f's argument changes; f should align with f (not be dropped and
    # reinserted), leaving one inner Replace
    before = node(
        "block",
        node("call", leaf("name", "f"), leaf("arg", "x")),
        node("call", leaf("name", "g"), leaf("arg", "y")),
    )
    after = node(
        "block",
        node("call", leaf("name", "f"), leaf("arg", "z")),
        node("call", leaf("name", "g"), leaf("arg", "y")),
    )
    patch = diff_terms(before, after)
    replaces = [n for n in iter_patch(patch) if isinstance(n, ReplaceNode)]
    assert len(replaces) == 1
    assert replaces[0].before.text == "x" and replaces[0].after.text == "z"


def test_identity_field_blocks_pairing():
    opts = DiffOptions(identity_fields={"decl": "name"})
    before = node("block", node("decl", name=leaf("id", "alpha"), body=leaf("word", "1")))
    after = node("block", node("decl", name=leaf("id", "beta"), body=leaf("word", "1")))
    patch = diff_terms(before, after, opts)
    # different identities: the decl must not be a Copy with an inner edit
    for n in iter_patch(patch):
        if isinstance(n, CopyNode) and n.kind == "decl":
            pytest.fail("decl nodes with different identity paired")


def test_identity_field_allows_pairing_same_name():
    opts = DiffOptions(identity_fields={"decl": "name"})
    before = node("block", node("decl", name=leaf("id", "alpha"), body=leaf("word", "1")))
    after = node("block", node("decl", name=leaf("id", "alpha"), body=leaf("word", "2")))
    patch = diff_terms(before, after, opts)
    assert any(isinstance(n, CopyNode) and n.kind == "decl" for n in iter_patch(patch))


def test_field_level_diffing():
    before = node("decl", name=leaf("id", "f"), body=leaf("word", "old"))
    after = node("decl", name=leaf("id", "f"), body=leaf("word", "new"))
    patch = diff_terms(before, after)
    assert isinstance(patch, CopyNode)
    by_name = {fd.name: fd for fd in patch.fields}
    assert isinstance(by_name["name"].slots[0], CopyNode)
    assert isinstance(by_name["body"].slots[0], ReplaceNode)


def test_round_trip_random_trees():
    rng = random.Random(99)
    for _ in range(80):
        before = random_term(rng, 120)
        after = mutate(rng, before, rng.randint(0, 8))
        patch = diff_terms(before, after)
        assert apply_patch(patch, Side.BEFORE) == before
        assert apply_patch(patch, Side.AFTER) == after
        if patch_is_identity(patch):
            assert before == after


def test_round_trip_keyed_options():
    opts = DiffOptions(keyed_kinds={"object": "key"})
    rng = random.Random(123)
    for _ in range(40):
        before = random_term(rng, 80)
        after = mutate(rng, before, rng.randint(0, 6))
        patch = diff_terms(before, after, opts)
        assert apply_patch(patch, Side.BEFORE) == before
        assert apply_patch(patch, Side.AFTER) == after


def test_keyed_reorder_produces_no_edits():
    before = obj(pair("a", "1"), pair("b", "2"), pair("c", "3"))
    after = obj(pair("c", "3"), pair("a", "1"), pair("b", "2"))
    opts = DiffOptions(keyed_kinds={"object": "key"})
    patch = diff_terms(before, after, opts)
    assert patch_is_identity(patch)
    # projections still restore each side's own order
    assert apply_patch(patch, Side.BEFORE) == before
    assert apply_patch(patch, Side.AFTER) == after


def test_unkeyed_reorder_is_noisy():
    before = obj(pair("a", "1"), pair("b", "2"), pair("c", "3"))
    after = obj(pair("c", "3"), pair("a", "1"), pair("b", "2"))
    patch = diff_terms(before, after, DiffOptions(move_detection=False))
    assert not patch_is_identity(patch)


def test_keyed_value_change_lands_inside_pair():
    before = obj(pair("a", "1"), pair("b", "2"))
    after = obj(pair("b", "2"), pair("a", "9"))
    opts = DiffOptions(keyed_kinds={"object": "key"})
    patch = diff_terms(before, after, opts)
    replaces = [n for n in iter_patch(patch) if isinstance(n, ReplaceNode)]
    assert len(replaces) == 1
    assert replaces[0].before.text == "1" and replaces[0].after.text == "9"


def test_keyed_added_and_removed_keys():
    before = obj(pair("a", "1"), pair("b", "2"))
    after = obj(pair("a", "1"), pair("c", "3"))
    opts = DiffOptions(keyed_kinds={"object": "key"})
    patch = diff_terms(before, after, opts)
    deletes = [n for n in iter_patch(patch) if isinstance(n, DeleteNode)]
    inserts = [n for n in iter_patch(patch) if isinstance(n, InsertNode)]
    assert len(deletes) == 1 and len(inserts) == 1


def test_diff_keyed_forces_reconciliation():
    before = obj(pair("a", "1"), pair("b", "2"))
    after = obj(pair("b", "2"), pair("a", "1"))
    patch = diff_keyed(before, after, "key")
    assert patch_is_identity(patch)


def test_missing_key_field_diagnostic():
    stray = node("pair", value=leaf("number", "7"))  # no key field
    before = obj(pair("a", "1"), stray)
    after = obj(pair("a", "1"))
    diags: list = []
    diff_keyed(before, after, "key", diagnostics=diags)
    missing = [d for d in diags if isinstance(d, MissingKeyField)]
    assert missing
    assert missing[0].side is Side.BEFORE
    assert missing[0].index == 1


def test_duplicate_keys_fall_back_positionally():
    before = obj(pair("a", "1"), pair("a", "2"))
    after = obj(pair("a", "2"), pair("a", "1"))
    patch = diff_keyed(before, after, "key")
    # must not crash or lose content, whatever alignment it picks
    assert apply_patch(patch, Side.BEFORE) == before
    assert apply_patch(patch, Side.AFTER) == after


def make_def(name: str, body_word: str) -> Term:
    return node("def", name=leaf("id", name),
                body=node("block", leaf("word", body_word), leaf("word", body_word)))


def test_move_detection_pairs_delete_with_insert():
    f, g, h = make_def("f", "aa"), make_def("g", "bb"), make_def("h", "cc")
    before = node("module", f, g, h)
    after = node("module", g, h, f)
    # identity fields stop f pairing with g or h positionally, so f shows
    # up as a delete plus an insert, which move matching then reunites
    patch = diff_terms(before, after, DiffOptions(identity_fields={"def": "name"}))
    deletes = [n for n in iter_patch(patch) if isinstance(n, DeleteNode)]
    inserts = [n for n in iter_patch(patch) if isinstance(n, InsertNode)]
    moved_d = [d for d in deletes if d.moved]
    moved_i = [i for i in inserts if i.moved]
    assert moved_d and moved_i
    assert moved_d[0].move_group == moved_i[0].move_group
    assert moved_d[0].term == moved_i[0].term


def test_move_detection_off():
    f, g, h = make_def("f", "aa"), make_def("g", "bb"), make_def("h", "cc")
    before = node("module", f, g, h)
    after = node("module", g, h, f)
    patch = diff_terms(
        before,
        after,
        DiffOptions(move_detection=False, identity_fields={"def": "name"}),
    )
    assert not any(
        getattr(n, "moved", False) for n in iter_patch(patch)
    )


def test_match_moves_direct():
    a = make_def("f", "xx")
    b = make_def("f", "xx")
    unrelated = leaf("word", "zzz")
    pairs = match_moves([a, unrelated], [b])
    assert pairs == [(a, b)]


def test_match_moves_respects_threshold():
    a = make_def("f", "xx")
    b = make_def("totally", "different")
    assert match_moves([a], [b], DiffOptions(similarity_threshold=0.05)) == []


def test_options_validation():
    with pytest.raises(ValueError):
        DiffOptions(p=0)
    with pytest.raises(ValueError):
        DiffOptions(q=0)
    with pytest.raises(ValueError):
        DiffOptions(dimensions=1)
    with pytest.raises(ValueError):
        DiffOptions(similarity_threshold=1.5)


def test_apply_patch_rejects_odd_sides():
    patch = diff_terms(leaf("word", "x"), leaf("word", "x"))
    with pytest.raises(ValueError):
        apply_patch(patch, Side.BOTH)


def test_deeply_nested_trees_diff_cleanly():
    # well beyond the default interpreter recursion limit
    t = leaf("word", "x")
    u = leaf("word", "y")
    for _ in range(2500):
        t = node("wrap", t)
        u = node("wrap", u)
    patch = diff_terms(t, u)
    assert apply_patch(patch, Side.BEFORE) == t
    assert apply_patch(patch, Side.AFTER) == u


def test_error_status_changes_break_identity():
    from semascope.syntax import ErrorStatus

    before = node("stmt", leaf("word", "x"))
    after = Term("stmt", ZERO_SPAN, None, (), (leaf("word", "x"),), ErrorStatus.ERROR)
    patch = diff_terms(before, after)
    assert not patch_is_identity(patch)
    assert apply_patch(patch, Side.BEFORE) == before
    assert apply_patch(patch, Side.AFTER) == after
