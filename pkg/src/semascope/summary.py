"""Declaration-level change summaries folded out of a patch tree.

A change's table of contents lists the functions, methods, and classes that
were added, removed, or modified.  Attribution follows the innermost
enclosing declaration: a leaf edit inside a method reports that method, not
its class (unless enclosing-chain reporting is requested).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .diff.engine import (
    CopyNode,
    DeleteNode,
    InsertNode,
    PatchNode,
    ReplaceNode,
    apply_patch,
)
from .syntax import ErrorStatus, Side, SourceSpan, Term, iter_terms, term_text


class Change(Enum):
    ADDED = "added"
    REMOVED = "removed"
    MODIFIED = "modified"


@dataclass(frozen=True)
class DeclarationRule:
    """Marks a node kind as a declaration: its display category and the
    field path leading to its name leaf."""

    kind: str
    category: str
    name_path: tuple[str, ...] = ("name",)


@dataclass(frozen=True)
class TocEntry:
    file: str
    category: str
    name: str
    change: Change
    span: SourceSpan  # after-side for Added/Modified, before-side for Removed


def declaration_name(term: Term, name_path: Iterable[str]) -> str:
    """Resolve a rule's name path; error or absent identifiers come back as
    "<anonymous>"."""
    cursor: Term | None = term
    for field_name in name_path:
        members = cursor.field(field_name) if cursor is not None else ()
        cursor = members[0] if members else None
    if cursor is None or cursor.error is not ErrorStatus.OK:
        return "<anonymous>"
    name = term_text(cursor)
    return name if name else "<anonymous>"


def table_of_contents(
    patch: PatchNode,
    rules: Iterable[DeclarationRule],
    file: str,
    include_enclosing: bool = False,
) -> list[TocEntry]:
    """One entry per added/removed declaration plus one Modified entry per
    declaration whose interior changed.  include_enclosing additionally
    marks every enclosing declaration of a change as Modified."""
    by_kind = {rule.kind: rule for rule in rules}
    entries: list[TocEntry] = []
    # Copy declarations to report as Modified, keyed by object identity so a
    # declaration with many inner changes reports once.
    flagged: dict[int, CopyNode] = {}

    def term_decls(term: Term, change: Change) -> bool:
        found = False
        for node in iter_terms(term):
            rule = by_kind.get(node.kind)
            if rule is None:
                continue
            found = True
            entries.append(
                TocEntry(file, rule.category, declaration_name(node, rule.name_path), change, node.span)
            )
        return found

    def flag(stack: list[CopyNode]) -> None:
        picks = stack if include_enclosing else stack[-1:]
        for decl in picks:
            flagged.setdefault(id(decl), decl)

    def visit(node: PatchNode, stack: list[CopyNode]) -> None:
        if isinstance(node, CopyNode):
            inner = stack + [node] if node.kind in by_kind else stack
            for fd in node.fields:
                for slot in fd.slots:
                    visit(slot, inner)
            for child in node.children:
                visit(child, inner)
            return
        if isinstance(node, InsertNode):
            reported = term_decls(node.term, Change.ADDED)
        elif isinstance(node, DeleteNode):
            reported = term_decls(node.term, Change.REMOVED)
        else:
            removed = term_decls(node.before, Change.REMOVED)
            added = term_decls(node.after, Change.ADDED)
            reported = removed or added
        if stack and (not reported or include_enclosing):
            flag(stack)

    visit(patch, [])
    for decl in flagged.values():
        rule = by_kind[decl.kind]
        after = apply_patch(decl, Side.AFTER)
        entries.append(
            TocEntry(file, rule.category, declaration_name(after, rule.name_path), Change.MODIFIED, decl.after_span)
        )
    entries.sort(
        key=lambda e: (e.span.start_byte, e.span.end_byte, e.change.value, e.category, e.name)
    )
    return entries


def entry_to_obj(entry: TocEntry) -> dict[str, Any]:
    return {
        "file": entry.file,
        "category": entry.category,
        "name": entry.name,
        "change": entry.change.value,
        "span": list(entry.span.as_tuple()),
    }


def entry_text(entry: TocEntry) -> str:
    line = entry.span.start_point[0] + 1
    return f"{entry.change.value} {entry.category} {entry.name} ({entry.file}:{line})"
