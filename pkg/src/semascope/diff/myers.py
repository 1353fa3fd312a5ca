"""Shortest edit script between two sequences, Myers' O((n+m)D) algorithm.

The forward greedy search tracks, per difference round d, the furthest
reaching x on each diagonal k.  Round snapshots serve two purposes: exact
backtracking of one minimal script, and the optional search trace that the
SVG renderer draws.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar, Union

E = TypeVar("E")

#: Frontier states recorded before a trace stops growing.
TRACE_STATE_LIMIT = 10_000


@dataclass(frozen=True, slots=True)
class Keep:
    """Element pair judged equal: before[before_index] ~ after[after_index]."""

    before_index: int
    after_index: int


@dataclass(frozen=True, slots=True)
class Insert:
    """after[after_index] has no counterpart in before."""

    after_index: int


@dataclass(frozen=True, slots=True)
class Delete:
    """before[before_index] has no counterpart in after."""

    before_index: int


EditOp = Union[Keep, Insert, Delete]


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...]
    distance: int  # inserts + deletes; the Myers D value

    def __iter__(self):
        return iter(self.ops)


@dataclass
class TraceRound:
    """Furthest-reaching states of one difference round.

    Each entry is (k, x_start, x_end): the diagonal, the x after the single
    horizontal/vertical step, and the x after sliding down the snake."""

    d: int
    entries: list[tuple[int, int, int]] = field(default_factory=list)


@dataclass
class SesTrace:
    """Caller-owned buffer filled by ses when passed in."""

    before_length: int = 0
    after_length: int = 0
    rounds: list[TraceRound] = field(default_factory=list)
    state_limit: int = TRACE_STATE_LIMIT
    truncated: bool = False

    @property
    def states(self) -> int:
        return sum(len(r.entries) for r in self.rounds)


def ses(
    before: Sequence[E],
    after: Sequence[E],
    equal: Callable[[E, E], bool] | None = None,
    trace: SesTrace | None = None,
) -> EditScript:
    """Minimum-length edit script under unit-cost insert/delete.

    equal defaults to ==.  When a trace buffer is supplied, every frontier
    state is recorded until the buffer's state limit is reached."""
    n, m = len(before), len(after)
    if trace is not None:
        trace.before_length = n
        trace.after_length = m
    fast = equal is None or equal is operator.eq
    recorded = trace.states if trace is not None else 0
    max_d = n + m
    # v[offset + k] = furthest x on diagonal k; k and d share parity per round
    offset = max_d + 1
    v = [0] * (2 * max_d + 3)
    snapshots: list[list[int]] = []  # snapshots[d] = v[-d-1 .. d+1] around offset
    found_d = -1
    for d in range(max_d + 1):
        current = TraceRound(d) if trace is not None and not trace.truncated else None
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v[offset + k - 1] < v[offset + k + 1]):
                x = v[offset + k + 1]  # vertical step: insert
            else:
                x = v[offset + k - 1] + 1  # horizontal step: delete
            y = x - k
            x_start = x
            if fast:
                while x < n and y < m and before[x] == after[y]:
                    x += 1
                    y += 1
            else:
                while x < n and y < m and equal(before[x], after[y]):
                    x += 1
                    y += 1
            v[offset + k] = x
            if current is not None and not trace.truncated:
                current.entries.append((k, x_start, x))
                recorded += 1
                if recorded >= trace.state_limit:
                    trace.truncated = True
            if x >= n and x - k >= m:
                found_d = d
                break
        if current is not None:
            trace.rounds.append(current)
        snapshots.append(v[offset - d - 1 : offset + d + 2])
        if found_d >= 0:
            break
    assert found_d >= 0, "search must terminate within n+m rounds"
    ops = _backtrack(n, m, found_d, snapshots)
    return EditScript(tuple(ops), found_d)


def _backtrack(n: int, m: int, final_d: int, snapshots: list[list[int]]) -> list[EditOp]:
    """Reconstruct one minimal script from per-round frontier snapshots."""
    ops: list[EditOp] = []
    x, y = n, m
    for d in range(final_d, 0, -1):
        prev = snapshots[d - 1]
        center = d  # prev covers diagonals -d..d (padded by one on each side)
        k = x - y
        if k == -d or (k != d and prev[center + k - 1] < prev[center + k + 1]):
            prev_k = k + 1  # arrived by vertical step
        else:
            prev_k = k - 1  # arrived by horizontal step
        prev_x = prev[center + prev_k]
        prev_y = prev_x - prev_k
        if prev_k == k + 1:
            mid_x, mid_y = prev_x, prev_y + 1
            step: EditOp = Insert(after_index=prev_y)
        else:
            mid_x, mid_y = prev_x + 1, prev_y
            step = Delete(before_index=prev_x)
        for i in reversed(range(x - mid_x)):
            ops.append(Keep(mid_x + i, mid_y + i))
        ops.append(step)
        x, y = prev_x, prev_y
    for i in reversed(range(x)):  # initial snake from the origin
        ops.append(Keep(i, i))
    ops.reverse()
    return ops


def replay(script: EditScript, before: Sequence[E], after: Sequence[E]) -> list[E]:
    """Apply a script to before, pulling inserted elements from after."""
    out: list[E] = []
    for op in script.ops:
        if isinstance(op, Keep):
            out.append(before[op.before_index])
        elif isinstance(op, Insert):
            out.append(after[op.after_index])
    return out
