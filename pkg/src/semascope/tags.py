"""Definition and reference tags for code navigation.

One rule-driven traversal per file: declarations bind names into a scope
table as they are met, references consult it, and a language may mark a
reference kind call-ambiguous so bare out-of-scope names read as calls (the
Ruby-style "zero-argument call or local variable" problem).  Resolution is
name-based within a file, ctags-style; no cross-file scope graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .syntax import SourceSpan, Term


class Role(Enum):
    DEFINITION = "definition"
    REFERENCE = "reference"


@dataclass(frozen=True)
class TagRule:
    """How one node kind produces tags.

    name_path: field path to the name leaf; () means the node itself, None
    means the rule emits no primary tag (it may still bind locals).
    binds_locals: field whose local_kinds leaves declare local names.
    ambiguous_call: for references, out-of-scope names become "call"."""

    kind: str
    role: Role
    category: str
    name_path: tuple[str, ...] | None = ()
    scope_introducing: bool = False
    binds_locals: str | None = None
    local_kinds: tuple[str, ...] = ("identifier",)
    ambiguous_call: bool = False
    name_descend: bool = False  # follow lone named children below the path end


@dataclass(frozen=True)
class Tag:
    name: str
    role: Role
    category: str
    span: SourceSpan
    line: str  # trimmed source line at the span's start row
    scope_path: tuple[str, ...] = ()


class ScopeTable:
    """Stack of frames of locally declared names, searched innermost-out."""

    def __init__(self) -> None:
        self.frames: list[set[str]] = [set()]

    def push(self) -> None:
        self.frames.append(set())

    def pop(self) -> None:
        self.frames.pop()

    def declare(self, name: str) -> None:
        self.frames[-1].add(name)

    def __contains__(self, name: str) -> bool:
        return any(name in frame for frame in reversed(self.frames))


def _resolve(term: Term, name_path: tuple[str, ...], descend: bool = False) -> Term | None:
    cursor: Term | None = term
    for field_name in name_path:
        members = cursor.field(field_name) if cursor is not None else ()
        cursor = members[0] if members else None
    while descend and cursor is not None and not cursor.is_leaf:
        # follow wrappers with exactly one named member (a kind that is not
        # its own token text), e.g. a quoted string down to its content
        named = [
            t
            for t in list(cursor.children) + [t for _, ts in cursor.fields for t in ts]
            if t.kind != t.text
        ]
        cursor = named[0] if len(named) == 1 else None
    if cursor is None or not cursor.is_leaf or cursor.text == "":
        return None
    return cursor


# Binding never looks inside these kinds (their identifiers are uses, not
# fresh names) nor under value-ish fields.
_OPAQUE_BIND_KINDS = frozenset({"attribute", "subscript", "call"})
_OPAQUE_BIND_FIELDS = frozenset({"value", "type", "right"})


def _leaves_under(terms: Iterable[Term], kinds: tuple[str, ...]) -> list[Term]:
    out: list[Term] = []
    stack = list(reversed(list(terms)))
    while stack:
        node = stack.pop()
        if node.is_leaf:
            if node.kind in kinds:
                out.append(node)
            continue
        if node.kind in _OPAQUE_BIND_KINDS:
            continue
        nested = [
            t
            for name, ts in node.fields
            if name not in _OPAQUE_BIND_FIELDS
            for t in ts
        ]
        nested.extend(node.children)
        for child in reversed(nested):
            stack.append(child)
    return out


def extract_tags(term: Term, rules: Iterable[TagRule], source: bytes) -> list[Tag]:
    """Single-pass tag extraction; result ordered by span."""
    by_kind: dict[str, list[TagRule]] = {}
    for rule in rules:
        by_kind.setdefault(rule.kind, []).append(rule)
    lines = source.split(b"\n")
    scope = ScopeTable()
    scope_names: list[str] = []
    consumed: set[int] = set()
    tags: list[Tag] = []

    def line_at(span: SourceSpan) -> str:
        row = span.start_point[0]
        if 0 <= row < len(lines):
            return lines[row].decode("utf-8", errors="replace").strip()
        return ""

    def emit(leaf: Term, role: Role, category: str) -> None:
        tags.append(Tag(leaf.text or "", role, category, leaf.span, line_at(leaf.span), tuple(scope_names)))

    # events: ("enter", term) | ("exit", popped_frame, popped_name)
    stack: list[tuple] = [("enter", term)]
    while stack:
        event = stack.pop()
        if event[0] == "exit":
            if event[1]:
                scope.pop()
            if event[2]:
                scope_names.pop()
            continue
        node: Term = event[1]
        pushed_frame = pushed_name = False
        for rule in by_kind.get(node.kind, ()):
            name_leaf = None
            if rule.name_path is not None:
                name_leaf = _resolve(node, rule.name_path, rule.name_descend)
                if name_leaf is not None and id(name_leaf) in consumed:
                    name_leaf = None
            if rule.role is Role.DEFINITION:
                if name_leaf is not None:
                    scope.declare(name_leaf.text or "")
                    emit(name_leaf, Role.DEFINITION, rule.category)
                    consumed.add(id(name_leaf))
                if rule.scope_introducing:
                    scope.push()
                    pushed_frame = True
                    if name_leaf is not None:
                        scope_names.append(name_leaf.text or "")
                        pushed_name = True
                if rule.binds_locals is not None:
                    for leaf in _leaves_under(node.field(rule.binds_locals), rule.local_kinds):
                        if id(leaf) in consumed:
                            continue
                        scope.declare(leaf.text or "")
                        emit(leaf, Role.DEFINITION, "variable")
                        consumed.add(id(leaf))
            else:
                if name_leaf is not None:
                    name = name_leaf.text or ""
                    category = rule.category
                    if rule.ambiguous_call and name not in scope:
                        category = "call"
                    emit(name_leaf, Role.REFERENCE, category)
                    consumed.add(id(name_leaf))
        if not node.is_leaf:
            stack.append(("exit", pushed_frame, pushed_name))
            ordered = [t for _, ts in node.fields for t in ts] + list(node.children)
            ordered.sort(key=lambda t: (t.span.start_byte, t.span.end_byte))
            for child in reversed(ordered):
                stack.append(("enter", child))
    tags.sort(key=lambda t: (t.span.start_byte, t.span.end_byte))
    return tags


def find_definitions(tags: Iterable[Tag], name: str) -> list[Tag]:
    """Definition tags with exactly this name, document order."""
    return [t for t in tags if t.role is Role.DEFINITION and t.name == name]


def find_references(tags: Iterable[Tag], name: str) -> list[Tag]:
    """Reference tags with exactly this name, document order."""
    return [t for t in tags if t.role is Role.REFERENCE and t.name == name]


def tag_to_obj(tag: Tag) -> dict[str, Any]:
    return {
        "name": tag.name,
        "role": tag.role.value,
        "category": tag.category,
        "span": list(tag.span.as_tuple()),
        "line": tag.line,
        "scope_path": list(tag.scope_path),
    }


def tag_from_obj(obj: dict[str, Any]) -> Tag:
    return Tag(
        name=obj["name"],
        role=Role(obj["role"]),
        category=obj["category"],
        span=SourceSpan.from_tuple(obj["span"]),
        line=obj["line"],
        scope_path=tuple(obj["scope_path"]),
    )


_KIND_LETTERS = {"function": "f", "class": "c", "method": "m", "variable": "v", "call": "r"}


def ctags_lines(tags: Iterable[Tag], filename: str) -> list[str]:
    """ctags-compatible lines: name, file, address pattern, kind letter."""
    out = []
    for tag in tags:
        pattern = tag.line.replace("\\", r"\\").replace("/", r"\/")
        letter = _KIND_LETTERS.get(tag.category, tag.category[:1] or "x")
        if tag.role is Role.REFERENCE and tag.category == "variable":
            letter = "r"
        out.append(f"{tag.name}\t{filename}\t/^{pattern}$/;\"\t{letter}")
    return out
