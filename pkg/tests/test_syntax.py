"""Core tree type: construction, traversal, fold/unfold, validation."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semascope.syntax import (
    ErrorStatus,
    InvalidTermError,
    NodeData,
    SourceSpan,
    Term,
    UnfoldDepthError,
    ZERO_SPAN,
    child_terms,
    count_terms,
    fold,
    iter_terms,
    para,
    term_text,
    unfold,
    validate_term,
)

from conftest import mutate, random_term


def span(a: int, b: int) -> SourceSpan:
    return SourceSpan(a, b, (0, a), (0, b))


def test_leaf_basics():
    t = Term("word", span(0, 2), "hi")
    assert t.is_leaf
    assert t.field("anything") == ()
    assert term_text(t) == "hi"
    assert count_terms(t) == 1


def test_span_rejects_negative_range():
    with pytest.raises(ValueError):
        SourceSpan(5, 3, (0, 5), (0, 3))


def test_field_lookup_and_order():
    name = Term("word", span(0, 1), "f")
    body = Term("word", span(2, 3), "b")
    t = Term("decl", span(0, 3), None, (("name", (name,)), ("body", (body,))))
    assert t.field("name") == (name,)
    assert t.field_names == ("name", "body")
    assert child_terms(t) == (name, body)


def test_child_terms_interleaves_fields_and_anonymous_by_span():
    a = Term("word", span(0, 1), "a")
    b = Term("word", span(2, 3), "b")
    c = Term("word", span(4, 5), "c")
    t = Term("node", span(0, 5), None, (("mid", (b,)),), (a, c))
    assert child_terms(t) == (a, b, c)


def test_iter_terms_preorder():
    inner = Term("inner", span(1, 3), None, (), (Term("word", span(1, 2), "x"),))
    root = Term("root", span(0, 4), None, (), (inner, Term("word", span(3, 4), "y")))
    kinds = [t.kind for t in iter_terms(root)]
    assert kinds == ["root", "inner", "word", "word"]


def test_fold_counts_match_count_terms():
    rng = random.Random(11)
    for _ in range(25):
        t = random_term(rng, 60)
        total = fold(t, lambda node, kids: 1 + sum(kids))
        assert total == count_terms(t)


def test_fold_handles_degenerate_deep_tree():
    # deeper than the default recursion limit
    leaf = Term("word", ZERO_SPAN, "x")
    t = leaf
    for _ in range(5000):
        t = Term("wrap", ZERO_SPAN, None, (), (t,))
    assert fold(t, lambda node, kids: 1 + sum(kids)) == 5001


def test_para_sees_original_children():
    seen = []

    def algebra(node, pairs):
        for child, _ in pairs:
            seen.append(child.kind)
        return None

    inner = Term("inner", span(0, 1), None, (), (Term("word", span(0, 1), "x"),))
    para(Term("root", span(0, 1), None, (), (inner,)), algebra)
    assert seen == ["word", "inner"]


def test_unfold_builds_expected_shape():
    def coalg(n: int):
        if n == 0:
            return NodeData("word", ZERO_SPAN, text="leaf"), []
        return NodeData("branch", ZERO_SPAN, child_fields=(None, "right")), [n - 1, 0]

    t = unfold(2, coalg)
    assert t.kind == "branch"
    assert t.field("right")[0].text == "leaf"
    assert t.children[0].kind == "branch"
    assert count_terms(t) == 5


def test_unfold_depth_budget():
    def coalg(n: int):
        return NodeData("wrap", ZERO_SPAN), [n + 1]

    with pytest.raises(UnfoldDepthError):
        unfold(0, coalg, max_depth=50)


def test_unfold_fold_inverse_on_random_trees():
    # decompose a term into (data, child seeds) and rebuild it
    def coalg(t: Term):
        kids = child_terms(t)
        fields = tuple(_field_of(t, k) for k in kids)
        return NodeData(t.kind, t.span, t.text, t.error, fields or None), list(kids)

    def _field_of(t: Term, child: Term):
        for name, members in t.fields:
            for m in members:
                if m is child:
                    return name
        return None

    rng = random.Random(3)
    for _ in range(40):
        t = random_term(rng, 80)
        rebuilt = unfold(t, coalg)
        assert rebuilt == t


def test_validate_accepts_random_trees():
    rng = random.Random(5)
    for _ in range(50):
        t = mutate(rng, random_term(rng, 100), rng.randint(0, 6))
        validate_term(t)


def test_validate_rejects_leaf_with_children():
    bad = Term("word", span(0, 2), "x", (), (Term("word", span(0, 1), "y"),))
    with pytest.raises(InvalidTermError):
        validate_term(bad)


def test_validate_rejects_span_escape():
    child = Term("word", span(0, 9), "long")
    bad = Term("node", span(0, 3), None, (), (child,))
    with pytest.raises(InvalidTermError):
        validate_term(bad)


def test_validate_rejects_sibling_disorder():
    a = Term("word", span(3, 4), "a")
    b = Term("word", span(0, 1), "b")
    bad = Term("node", span(0, 4), None, (), (a, b))
    with pytest.raises(InvalidTermError):
        validate_term(bad)


def test_error_status_propagation_helpers():
    t = Term("word", span(0, 1), "x")
    marked = t.with_error(ErrorStatus.MISSING)
    assert marked.error is ErrorStatus.MISSING
    assert t.error is ErrorStatus.OK  # original untouched


# hypothesis: fold over arbitrary shallow trees agrees with a recursive count

@st.composite
def terms(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return Term("word", ZERO_SPAN, draw(st.text(max_size=3)))
    kids = draw(st.lists(terms(depth=depth - 1), max_size=3))
    return Term("node", ZERO_SPAN, None, (), tuple(kids))


@settings(max_examples=60, deadline=None)
@given(terms())
def test_fold_count_matches_recursion(t):
    def rec(n):
        return 1 + sum(rec(c) for c in child_terms(n))

    assert fold(t, lambda n, kids: 1 + sum(kids)) == rec(t)


@settings(max_examples=60, deadline=None)
@given(terms())
def test_term_text_is_leaf_concat(t):
    leaves = [n.text for n in iter_terms(t) if n.is_leaf]
    assert term_text(t) == "".join(leaves)
