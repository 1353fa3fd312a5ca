"""pq-gram extraction and the deterministic feature embedding, checked
against a direct recursive enumeration."""
from __future__ import annotations

import random
from collections import Counter
from hashlib import blake2b

import pytest

from semascope.diff.engine import DiffOptions
from semascope.diff.grams import (
    distance,
    feature_vector,
    gram_bytes,
    pq_grams,
    relative_distance,
)
from semascope.syntax import Term, ZERO_SPAN, child_terms

from conftest import mutate, random_term


def naive_label(term):
    if term.text is None:
        return (term.kind, None)
    return (term.kind, blake2b(term.text.encode(), digest_size=8).digest())


def naive_pq_grams(term: Term, p: int, q: int) -> Counter:
    """Straight recursive definition: stems from root paths, windows from
    sentinel-padded child lists."""
    grams: Counter = Counter()

    def walk(node: Term, path: list):
        stem = ([None] * p + path + [naive_label(node)])[-p:]
        kids = child_terms(node)
        if not kids:
            grams[(tuple(stem), (None,) * q)] += 1
            return
        padded = [None] * (q - 1) + [naive_label(k) for k in kids] + [None] * (q - 1)
        for i in range(len(kids) + q - 1):
            grams[(tuple(stem), tuple(padded[i : i + q]))] += 1
        for k in kids:
            walk(k, path + [naive_label(node)])

    walk(term, [])
    return grams


@pytest.mark.parametrize("p,q", [(1, 1), (2, 3), (3, 2), (2, 1), (4, 4)])
def test_matches_naive_enumeration(p, q):
    rng = random.Random(p * 10 + q)
    for _ in range(30):
        t = mutate(rng, random_term(rng, 60), rng.randint(0, 4))
        assert pq_grams(t, p, q) == naive_pq_grams(t, p, q)


def test_rejects_degenerate_shape():
    t = Term("word", ZERO_SPAN, "x")
    with pytest.raises(ValueError):
        pq_grams(t, 0, 3)
    with pytest.raises(ValueError):
        pq_grams(t, 2, 0)


def test_single_leaf_gram_count():
    t = Term("word", ZERO_SPAN, "x")
    grams = pq_grams(t, 2, 3)
    assert sum(grams.values()) == 1
    ((stem, window),) = grams.keys()
    assert stem == (None, ("word", naive_label(t)[1]))
    assert window == (None, None, None)


def test_gram_count_formula():
    # each node with k >= 1 children contributes k+q-1 grams, leaves one
    rng = random.Random(3)
    for _ in range(20):
        t = random_term(rng, 80)
        q = 3
        expected = 0
        stack = [t]
        while stack:
            n = stack.pop()
            kids = child_terms(n)
            expected += (len(kids) + q - 1) if kids else 1
            stack.extend(kids)
        assert sum(pq_grams(t, 2, q).values()) == expected


def test_leaf_text_participates_in_labels():
    a = Term("word", ZERO_SPAN, "x")
    b = Term("word", ZERO_SPAN, "y")
    assert pq_grams(a, 2, 3) != pq_grams(b, 2, 3)


def test_gram_bytes_injective_on_sample():
    rng = random.Random(17)
    seen = {}
    for _ in range(40):
        t = random_term(rng, 40)
        for gram in pq_grams(t, 2, 3):
            raw = gram_bytes(gram)
            assert seen.get(raw, gram) == gram
            seen[raw] = gram


def test_feature_vector_is_deterministic_and_salt_free():
    opts = DiffOptions()
    rng = random.Random(8)
    t = random_term(rng, 100)
    v1 = feature_vector(t, opts)
    v2 = feature_vector(t, opts)
    assert v1 == v2
    assert len(v1) == opts.dimensions


def test_feature_vector_l1_mass_equals_gram_count():
    # every gram occurrence contributes exactly +-1 to one axis, so the sum
    # of absolute axis values can never exceed the gram count, and parity
    # matches
    opts = DiffOptions()
    rng = random.Random(12)
    for _ in range(20):
        t = random_term(rng, 60)
        total = sum(pq_grams(t, opts.p, opts.q).values())
        vec = feature_vector(t, opts)
        assert sum(abs(x) for x in vec) <= total
        assert (sum(abs(x) for x in vec) - total) % 2 == 0


def test_identical_trees_zero_distance():
    rng = random.Random(5)
    t = random_term(rng, 70)
    u = Term(t.kind, t.span, t.text, t.fields, t.children, t.error)
    opts = DiffOptions()
    assert distance(feature_vector(t, opts), feature_vector(u, opts)) == 0.0
    assert relative_distance(feature_vector(t, opts), feature_vector(u, opts)) == 0.0


def test_small_edit_small_relative_distance():
    rng = random.Random(44)
    opts = DiffOptions()
    base = random_term(rng, 150)
    tweaked = mutate(rng, base, 1)
    unrelated = random_term(random.Random(999), 150)
    near = relative_distance(feature_vector(base, opts), feature_vector(tweaked, opts))
    far = relative_distance(feature_vector(base, opts), feature_vector(unrelated, opts))
    assert near < far


def test_relative_distance_bounds():
    assert relative_distance((0.0, 0.0), (0.0, 0.0)) == 0.0
    assert relative_distance((1.0, 0.0), (0.0, 0.0)) == 1.0
    rng = random.Random(31)
    opts = DiffOptions()
    for _ in range(10):
        u = feature_vector(random_term(rng, 30), opts)
        v = feature_vector(random_term(rng, 30), opts)
        assert relative_distance(u, v) >= 0.0


def test_deep_tree_no_recursion_error():
    t = Term("word", ZERO_SPAN, "x")
    for _ in range(3000):
        t = Term("wrap", ZERO_SPAN, None, (), (t,))
    grams = pq_grams(t, 2, 3)
    # 3000 one-child nodes at q+0 window positions each (1+q-1 = 3), leaf adds 1
    assert sum(grams.values()) == 3000 * 3 + 1
