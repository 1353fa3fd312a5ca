"""Language-agnostic syntax trees and the recursion schemes that consume them.

A Term is an immutable node: a kind, a source span, either leaf text or
named fields plus anonymous children, and an error status for malformed
regions.  fold/unfold/para are iterative (explicit work lists) so trees of
100k+ nodes never touch the interpreter recursion limit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, TypeVar

A = TypeVar("A")
S = TypeVar("S")

#: Default expansion budget for unfold, measured in tree depth.
DEFAULT_UNFOLD_DEPTH = 10_000


class ErrorStatus(Enum):
    """Parse health of a node: ok, a malformed region, or inserted-by-recovery."""

    OK = "ok"
    ERROR = "error"
    MISSING = "missing"


class Side(Enum):
    """Which version of a source pair a value belongs to."""

    NEITHER = "neither"
    BEFORE = "before"
    AFTER = "after"
    BOTH = "both"


class InvalidTermError(ValueError):
    """A Term violated a structural invariant; .path locates the node."""

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{message} at {path}")
        self.path = path


class UnfoldDepthError(RuntimeError):
    """unfold exceeded its depth budget before the coalgebra terminated."""


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Half-open byte range plus (row, column) endpoints; columns count bytes."""

    start_byte: int
    end_byte: int
    start_point: tuple[int, int]
    end_point: tuple[int, int]

    def __post_init__(self) -> None:
        if self.start_byte < 0 or self.end_byte < self.start_byte:
            raise ValueError(f"degenerate byte range {self.start_byte}..{self.end_byte}")
        if self.end_point < self.start_point:
            raise ValueError(f"degenerate points {self.start_point}..{self.end_point}")

    @property
    def width(self) -> int:
        return self.end_byte - self.start_byte

    def contains(self, other: SourceSpan) -> bool:
        return self.start_byte <= other.start_byte and other.end_byte <= self.end_byte

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        (sr, sc), (er, ec) = self.start_point, self.end_point
        return (self.start_byte, self.end_byte, sr, sc, er, ec)

    @classmethod
    def from_tuple(cls, t: Iterable[int]) -> SourceSpan:
        sb, eb, sr, sc, er, ec = t
        return cls(sb, eb, (sr, sc), (er, ec))


ZERO_SPAN = SourceSpan(0, 0, (0, 0), (0, 0))


@dataclass(frozen=True)
class Annotation:
    """A span tagged with the side of a source pair it refers to."""

    span: SourceSpan
    side: Side = Side.NEITHER


@dataclass(frozen=True)
class Term:
    """One syntax node.  Leaves carry text; interior nodes carry fields
    (ordered name -> children lists) and anonymous children.  Field entries
    and children are kept in source order within each sequence."""

    kind: str
    span: SourceSpan
    text: str | None = None
    fields: tuple[tuple[str, tuple[Term, ...]], ...] = ()
    children: tuple[Term, ...] = ()
    error: ErrorStatus = ErrorStatus.OK

    @property
    def is_leaf(self) -> bool:
        return self.text is not None

    def field(self, name: str) -> tuple[Term, ...]:
        for key, terms in self.fields:
            if key == name:
                return terms
        return ()

    @property
    def field_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fields)

    def with_error(self, error: ErrorStatus) -> Term:
        return Term(self.kind, self.span, self.text, self.fields, self.children, error)


def child_terms(term: Term) -> tuple[Term, ...]:
    """All direct children (field members and anonymous) in source order."""
    if not term.fields:
        return term.children
    merged = [t for _, terms in term.fields for t in terms]
    merged.extend(term.children)
    merged.sort(key=lambda t: (t.span.start_byte, t.span.end_byte))
    return tuple(merged)


def iter_terms(term: Term) -> Iterator[Term]:
    """Pre-order traversal, iterative."""
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(child_terms(node)))


def count_terms(term: Term) -> int:
    return sum(1 for _ in iter_terms(term))


def term_depth(term: Term) -> int:
    """Longest root-to-leaf path, counted in nodes."""
    best = 0
    stack = [(term, 1)]
    while stack:
        node, d = stack.pop()
        if d > best:
            best = d
        stack.extend((child, d + 1) for child in child_terms(node))
    return best


def term_text(term: Term) -> str:
    """Concatenated leaf text of a subtree, in source order."""
    return "".join(t.text for t in iter_terms(term) if t.text is not None)


def fold(term: Term, algebra: Callable[[Term, list[A]], A]) -> A:
    """Bottom-up reduction: algebra(node, child_results) at every node.

    Iterative; safe for trees far deeper than the recursion limit."""
    # frame: [node, children, next_child_index, child_results]
    stack: list[list] = [[term, child_terms(term), 0, []]]
    while True:
        frame = stack[-1]
        node, kids, i, results = frame
        if i < len(kids):
            frame[2] = i + 1
            child = kids[i]
            stack.append([child, child_terms(child), 0, []])
            continue
        stack.pop()
        value = algebra(node, results)
        if not stack:
            return value
        stack[-1][3].append(value)


def para(term: Term, algebra: Callable[[Term, list[tuple[Term, A]]], A]) -> A:
    """Like fold, but each child result is paired with the original child."""
    stack: list[list] = [[term, child_terms(term), 0, []]]
    while True:
        frame = stack[-1]
        node, kids, i, results = frame
        if i < len(kids):
            frame[2] = i + 1
            child = kids[i]
            stack.append([child, child_terms(child), 0, []])
            continue
        stack.pop()
        value = algebra(node, results)
        if not stack:
            return value
        parent = stack[-1]
        parent[3].append((parent[1][parent[2] - 1], value))


@dataclass(frozen=True)
class NodeData:
    """Per-node payload produced by an unfold coalgebra.

    child_fields, when given, assigns a field name (or None for anonymous)
    to each child seed positionally."""

    kind: str
    span: SourceSpan = ZERO_SPAN
    text: str | None = None
    error: ErrorStatus = ErrorStatus.OK
    child_fields: tuple[str | None, ...] | None = None


def _assemble(data: NodeData, built: list[Term]) -> Term:
    if data.child_fields is None:
        return Term(data.kind, data.span, data.text, (), tuple(built), data.error)
    if len(data.child_fields) != len(built):
        raise ValueError(
            f"coalgebra for {data.kind!r} declared {len(data.child_fields)} "
            f"field slots but produced {len(built)} children"
        )
    fields: list[tuple[str, list[Term]]] = []
    anonymous: list[Term] = []
    for name, child in zip(data.child_fields, built):
        if name is None:
            anonymous.append(child)
            continue
        for existing, bucket in fields:
            if existing == name:
                bucket.append(child)
                break
        else:
            fields.append((name, [child]))
    return Term(
        data.kind,
        data.span,
        data.text,
        tuple((name, tuple(bucket)) for name, bucket in fields),
        tuple(anonymous),
        data.error,
    )


def unfold(
    seed: S,
    coalgebra: Callable[[S], tuple[NodeData, list[S]]],
    *,
    max_depth: int = DEFAULT_UNFOLD_DEPTH,
) -> Term:
    """Top-down construction from a seed.  The coalgebra maps a seed to node
    data plus child seeds.  Expansion deeper than max_depth raises
    UnfoldDepthError rather than recursing forever."""
    data, seeds = coalgebra(seed)
    # frame: [data, seeds, next_seed_index, built_children]
    stack: list[list] = [[data, seeds, 0, []]]
    while True:
        frame = stack[-1]
        data, seeds, i, built = frame
        if i < len(seeds):
            if len(stack) >= max_depth:
                raise UnfoldDepthError(
                    f"unfold exceeded depth budget {max_depth}; "
                    "raise max_depth if the expansion is intentional"
                )
            frame[2] = i + 1
            child_data, child_seeds = coalgebra(seeds[i])
            stack.append([child_data, child_seeds, 0, []])
            continue
        stack.pop()
        term = _assemble(data, built)
        if not stack:
            return term
        stack[-1][3].append(term)


def validate_term(term: Term) -> None:
    """Raise InvalidTermError on the first structural violation.

    Checks, per node: leaves carry text and nothing else, interior nodes
    carry no text, child spans are contained in the parent span, and
    siblings within each sequence are ordered by start byte."""
    stack: list[tuple[Term, str]] = [(term, "$")]
    while stack:
        node, path = stack.pop()
        if node.text is not None and (node.fields or node.children):
            raise InvalidTermError(f"leaf {node.kind!r} has children", path)
        sequences: list[tuple[str, tuple[Term, ...]]] = [
            (f".{name}", terms) for name, terms in node.fields
        ]
        sequences.append((".children", node.children))
        for label, terms in sequences:
            prev = None
            for idx, child in enumerate(terms):
                child_path = f"{path}{label}[{idx}]"
                if not node.span.contains(child.span):
                    raise InvalidTermError(
                        f"child span {child.span.as_tuple()} escapes parent "
                        f"{node.span.as_tuple()}",
                        child_path,
                    )
                if prev is not None and child.span.start_byte < prev:
                    raise InvalidTermError("siblings out of source order", child_path)
                prev = child.span.start_byte
                stack.append((child, child_path))
