"""Shortest edit script search: optimality against a DP oracle, script
well-formedness, replay, and trace capture."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semascope.diff.myers import (
    Delete,
    EditScript,
    Insert,
    Keep,
    SesTrace,
    TraceRound,
    ses,
    replay,
)


def dp_distance(a, b) -> int:
    """Textbook O(nm) edit distance with insert/delete only (unit cost)."""
    n, m = len(a), len(b)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j], cur[j - 1])
        prev = cur
    return prev[m]


def check_script(script: EditScript, a, b):
    """Structural soundness: indices advance monotonically, cover both
    sequences exactly, and Keep ops really match."""
    i = j = 0
    cost = 0
    for op in script.ops:
        if isinstance(op, Keep):
            assert op.before_index == i and op.after_index == j
            assert a[i] == b[j]
            i += 1
            j += 1
        elif isinstance(op, Delete):
            assert op.before_index == i
            i += 1
            cost += 1
        else:
            assert isinstance(op, Insert)
            assert op.after_index == j
            j += 1
            cost += 1
    assert (i, j) == (len(a), len(b))
    assert cost == script.distance


def test_identical_sequences():
    s = ses("abc", "abc")
    assert s.distance == 0
    assert all(isinstance(op, Keep) for op in s.ops)


def test_empty_cases():
    assert ses("", "").distance == 0
    s = ses("", "xy")
    assert s.distance == 2
    assert [type(op) for op in s.ops] == [Insert, Insert]
    s = ses("xy", "").distance
    assert s == 2


def test_classic_instance_distance_five():
    s = ses("ABCABBA", "CBABAC")
    assert s.distance == 5
    check_script(s, "ABCABBA", "CBABAC")


def test_replay_reconstructs_after():
    a, b = "kitten", "sitting"
    s = ses(a, b)
    assert "".join(replay(s, a, b)) == b
    check_script(s, a, b)


def test_custom_equality():
    a = ["Foo", "bar"]
    b = ["foo", "BAR"]
    s = ses(a, b, equal=lambda x, y: x.lower() == y.lower())
    assert s.distance == 0


def test_random_against_dp_oracle():
    rng = random.Random(1234)
    for _ in range(300):
        a = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 12)))
        b = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 12)))
        s = ses(a, b)
        assert s.distance == dp_distance(a, b), (a, b)
        check_script(s, a, b)
        assert "".join(replay(s, a, b)) == b


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet="abcde", max_size=14), st.text(alphabet="abcde", max_size=14))
def test_property_optimal_and_sound(a, b):
    s = ses(a, b)
    assert s.distance == dp_distance(a, b)
    check_script(s, a, b)


def test_trace_round_count_is_distance_plus_one():
    trace = SesTrace()
    s = ses("ABCABBA", "CBABAC", trace=trace)
    assert trace.before_length == 7 and trace.after_length == 6
    assert len(trace.rounds) == s.distance + 1
    assert [r.d for r in trace.rounds] == list(range(s.distance + 1))


def test_trace_entries_shape():
    trace = SesTrace()
    ses("abcab", "ayb", trace=trace)
    for r in trace.rounds:
        ks = [k for k, _, _ in r.entries]
        assert ks == sorted(ks)
        for k, x_start, x_end in r.entries:
            assert x_end >= x_start  # the snake only slides forward
            assert abs(k) <= r.d and (k - r.d) % 2 == 0


def test_trace_respects_state_limit():
    rng = random.Random(7)
    a = "".join(rng.choice("ab") for _ in range(300))
    b = "".join(rng.choice("cd") for _ in range(300))
    trace = SesTrace(state_limit=50)
    ses(a, b, trace=trace)
    assert trace.truncated
    assert trace.states <= 50


def test_trace_not_truncated_for_small_inputs():
    trace = SesTrace()
    ses("abc", "abd", trace=trace)
    assert not trace.truncated
    assert trace.states > 0


def test_scales_with_distance_not_area():
    # nearly equal megabyte-scale sequences finish quickly because work is
    # proportional to n*d, not n*m
    n = 50_000
    a = list(range(n))
    b = a[:1000] + a[1001:] + [n + 1]  # one delete, one insert
    s = ses(a, b)
    assert s.distance == 2


def test_duck_typed_sequences():
    s = ses((1, 2, 3), [1, 9, 3])
    assert s.distance == 2
    assert replay(s, (1, 2, 3), [1, 9, 3]) == [1, 9, 3]
