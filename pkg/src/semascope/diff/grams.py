"""pq-gram extraction and content-hashed feature vectors for subtree similarity.

A pq-gram is (ancestor stem of length p, child window of length q), taken
over the tree padded with sentinels: p-1 above the root, q-1 on each flank
of every child list.  Vectors hash each gram's canonical serialization with
blake2b to pick an axis and sign, so the embedding is a pure function of the
labeled shape: no PRNG, no per-process salt, identical across runs and
machines.
"""
from __future__ import annotations

import math
from collections import Counter
from hashlib import blake2b
from typing import TYPE_CHECKING

from ..syntax import Term, child_terms

if TYPE_CHECKING:  # avoid a cycle; engine imports this module
    from .engine import DiffOptions

# A label is None (sentinel) or (kind, leaf-text digest or None); a gram is
# (stem labels, window labels), both tuples, hashable for Counter keys.


def _label(term: Term) -> tuple[str, bytes | None]:
    if term.text is None:
        return (term.kind, None)
    return (term.kind, blake2b(term.text.encode("utf-8"), digest_size=8).digest())


def pq_grams(term: Term, p: int, q: int) -> Counter:
    """Multiset of pq-grams of the labeled shape.

    A node with k >= 1 children yields k+q-1 windows; a leaf yields one
    all-sentinel window.  Total grams = sum over nodes of that count."""
    if p < 1 or q < 1:
        raise ValueError(f"p and q must be >= 1, got p={p} q={q}")
    grams: Counter = Counter()
    ancestors: list = []  # labels of the path above the current node
    # ("visit", node) expands; ("pop",) unwinds the ancestor stack
    stack: list[tuple] = [("visit", term)]
    while stack:
        action = stack.pop()
        if action[0] == "pop":
            ancestors.pop()
            continue
        node = action[1]
        label = _label(node)
        stem = ancestors[-(p - 1):] if p > 1 else []
        stem = [None] * (p - 1 - len(stem)) + stem + [label]
        stem_t = tuple(stem)
        kids = child_terms(node)
        if not kids:
            grams[(stem_t, (None,) * q)] += 1
            continue
        window = [None] * (q - 1) + [_label(c) for c in kids] + [None] * (q - 1)
        for i in range(len(kids) + q - 1):
            grams[(stem_t, tuple(window[i : i + q]))] += 1
        ancestors.append(label)
        stack.append(("pop",))
        for child in reversed(kids):
            stack.append(("visit", child))
    return grams


def _label_bytes(label) -> bytes:
    if label is None:
        return b"s"
    kind, digest = label
    raw = kind.encode("utf-8")
    head = b"l" if digest is not None else b"i"
    out = head + len(raw).to_bytes(4, "big") + raw
    if digest is not None:
        out += digest
    return out


def gram_bytes(gram) -> bytes:
    """Canonical serialization of one gram, the hashing input."""
    stem, window = gram
    parts = [len(stem).to_bytes(2, "big")]
    parts.extend(_label_bytes(l) for l in stem)
    parts.append(b"|")
    parts.extend(_label_bytes(l) for l in window)
    return b"".join(parts)


def feature_vector(term: Term, opts: "DiffOptions") -> tuple[float, ...]:
    """Sum of signed unit contributions, one per gram occurrence.

    The gram's 64-bit content hash picks the axis (mod d) and the sign
    (bit 63), replacing RWS-style random projection with a deterministic
    one."""
    d = opts.dimensions
    vec = [0.0] * d
    for gram, count in pq_grams(term, opts.p, opts.q).items():
        h = int.from_bytes(blake2b(gram_bytes(gram), digest_size=8).digest(), "big")
        axis = h % d
        sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
        vec[axis] += sign * count
    return tuple(vec)


def distance(u: tuple[float, ...], v: tuple[float, ...]) -> float:
    return math.dist(u, v)


def relative_distance(u: tuple[float, ...], v: tuple[float, ...]) -> float:
    """Euclidean distance normalized by the larger magnitude; 0 when both zero."""
    scale = max(math.hypot(*u), math.hypot(*v))
    if scale == 0.0:
        return 0.0
    return math.dist(u, v) / scale
