"""Tree diffing: shape-dispatched alignment producing a patch tree.

Each patch position is Copy (kinds match, both sides present), Insert,
Delete, or Replace (same position, different content).  Fixed-arity field
slots diff pairwise; child lists align via Myers SES over cheap head
signatures; dictionary-shaped nodes reconcile children by key.  Unmatched
Delete/Insert subtrees then go through feature-vector move matching.

Projection laws the whole module is built around: replaying the Before side
of a patch yields the before tree exactly, and likewise After.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Mapping, Union

from ..syntax import ErrorStatus, Side, SourceSpan, Term, term_depth, term_text
from .grams import feature_vector, relative_distance
from .myers import Delete as SesDelete
from .myers import Insert as SesInsert
from .myers import Keep as SesKeep
from .myers import ses


@dataclass(frozen=True)
class DiffOptions:
    """Tuning knobs for alignment and move matching.

    p/q are pq-gram stem length and base width, dimensions the feature
    vector size.  identity_fields maps a node kind to the field whose text
    mediates that kind's identity; keyed_kinds maps a node kind to the field
    that keys its children."""

    p: int = 2
    q: int = 3
    dimensions: int = 15
    similarity_threshold: float = 0.4
    move_detection: bool = True
    identity_fields: Mapping[str, str] = dc_field(default_factory=dict)
    keyed_kinds: Mapping[str, str] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1:
            raise ValueError(f"p and q must be >= 1, got p={self.p} q={self.q}")
        if self.dimensions < 2:
            raise ValueError(f"dimensions must be >= 2, got {self.dimensions}")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError(
                f"similarity_threshold must lie in [0, 1], got {self.similarity_threshold}"
            )


DEFAULT_OPTIONS = DiffOptions()


@dataclass(frozen=True)
class MissingKeyField:
    """Diagnostic: a child of a keyed node lacked the key field."""

    side: Side
    index: int
    kind: str


@dataclass
class FieldDiff:
    """Diffed occupants of one named field slot."""

    name: str
    slots: list["PatchNode"]
    in_before: bool = True
    in_after: bool = True


@dataclass
class CopyNode:
    """Node present on both sides with matching kind; changes live inside."""

    kind: str
    before_span: SourceSpan
    after_span: SourceSpan
    text: str | None = None  # leaves only
    before_error: ErrorStatus = ErrorStatus.OK
    after_error: ErrorStatus = ErrorStatus.OK
    fields: list[FieldDiff] = dc_field(default_factory=list)
    children: list["PatchNode"] = dc_field(default_factory=list)
    before_field_order: tuple[str, ...] = ()
    after_field_order: tuple[str, ...] = ()
    before_index: int | None = None
    after_index: int | None = None


@dataclass
class InsertNode:
    """Whole subtree present only on the after side."""

    term: Term
    after_index: int | None = None
    moved: bool = False
    move_group: int | None = None


@dataclass
class DeleteNode:
    """Whole subtree present only on the before side."""

    term: Term
    before_index: int | None = None
    moved: bool = False
    move_group: int | None = None


@dataclass
class ReplaceNode:
    """Same position, different content; both subtrees carried whole."""

    before: Term
    after: Term
    before_index: int | None = None
    after_index: int | None = None


PatchNode = Union[CopyNode, InsertNode, DeleteNode, ReplaceNode]
PatchTree = PatchNode


# ---------------------------------------------------------------------------
# diffing

# Alignment recurses along the tree; give it stack headroom proportional to
# the input depth.  The raise is monotonic (never restored, so concurrent
# diffs cannot trip each other) and capped so adversarially deep input gets
# a clean RecursionError instead of exhausting the C stack.
_RECURSION_CEILING = 20_000


def _ensure_recursion_headroom(before: Term, after: Term) -> None:
    depth = max(term_depth(before), term_depth(after))
    need = min(depth * 6 + 200, _RECURSION_CEILING)
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def diff_terms(
    before: Term,
    after: Term,
    opts: DiffOptions = DEFAULT_OPTIONS,
    diagnostics: list | None = None,
) -> PatchTree:
    """Diff two trees; see the module docstring for the dispatch rules."""
    _ensure_recursion_headroom(before, after)
    root = _diff_pair(before, after, opts, diagnostics, None, None)
    if opts.move_detection:
        _mark_moves(root, opts)
    return root


def diff_keyed(
    before: Term,
    after: Term,
    key_field: str,
    opts: DiffOptions = DEFAULT_OPTIONS,
    diagnostics: list | None = None,
) -> PatchTree:
    """Diff two container nodes reconciling their children by key_field,
    regardless of what opts.keyed_kinds says about their kind."""
    _ensure_recursion_headroom(before, after)
    root = _diff_pair(before, after, opts, diagnostics, None, None, forced_key=key_field)
    if opts.move_detection:
        _mark_moves(root, opts)
    return root


def _key_text(term: Term, key_field: str) -> str | None:
    members = term.field(key_field)
    if not members:
        return None
    return term_text(members[0])


def _head_signature(term: Term, opts: DiffOptions):
    """Cheap equality key: kind, leafness+text, identity-field text."""
    identity_field = opts.identity_fields.get(term.kind)
    if identity_field is None:
        return (term.kind, term.text, None)
    return (term.kind, term.text, ("id", _key_text(term, identity_field)))


def _pairable(b: Term, a: Term, opts: DiffOptions) -> bool:
    """May a deleted and an inserted sibling be re-joined as one position?
    Same kind, and identity keys must agree when the kind declares one."""
    if b.kind != a.kind:
        return False
    identity_field = opts.identity_fields.get(b.kind)
    if identity_field is None:
        return True
    return _key_text(b, identity_field) == _key_text(a, identity_field)


def _diff_pair(
    b: Term,
    a: Term,
    opts: DiffOptions,
    diags: list | None,
    bi: int | None,
    ai: int | None,
    forced_key: str | None = None,
) -> PatchNode:
    if b.kind != a.kind or b.is_leaf != a.is_leaf:
        return ReplaceNode(b, a, bi, ai)
    if b.is_leaf:
        if b.text != a.text:
            return ReplaceNode(b, a, bi, ai)
        return CopyNode(
            kind=b.kind,
            before_span=b.span,
            after_span=a.span,
            text=b.text,
            before_error=b.error,
            after_error=a.error,
            before_index=bi,
            after_index=ai,
        )
    fields = _diff_fields(b, a, opts, diags)
    key_field = forced_key or opts.keyed_kinds.get(b.kind)
    if key_field is not None:
        children = _diff_keyed_children(b.children, a.children, key_field, opts, diags)
    else:
        children = _align_sequence(
            list(enumerate(b.children)), list(enumerate(a.children)), opts, diags
        )
    return CopyNode(
        kind=b.kind,
        before_span=b.span,
        after_span=a.span,
        before_error=b.error,
        after_error=a.error,
        fields=fields,
        children=children,
        before_field_order=b.field_names,
        after_field_order=a.field_names,
        before_index=bi,
        after_index=ai,
    )


def _diff_fields(b: Term, a: Term, opts: DiffOptions, diags: list | None) -> list[FieldDiff]:
    b_names, a_names = b.field_names, a.field_names
    order = list(b_names) + [n for n in a_names if n not in b_names]
    out: list[FieldDiff] = []
    for name in order:
        bl, al = b.field(name), a.field(name)
        if len(bl) == 1 and len(al) == 1:
            # fixed-arity slot: diff pairwise, kind mismatch becomes Replace
            slots = [_diff_pair(bl[0], al[0], opts, diags, 0, 0)]
        else:
            slots = _align_sequence(
                list(enumerate(bl)), list(enumerate(al)), opts, diags
            )
        out.append(FieldDiff(name, slots, name in b_names, name in a_names))
    return out


def _align_sequence(
    b_items: list[tuple[int, Term]],
    a_items: list[tuple[int, Term]],
    opts: DiffOptions,
    diags: list | None,
) -> list[PatchNode]:
    """SES alignment over head signatures, then Delete/Insert runs refined by
    re-joining same-kind positions (same-kind always pairs, recursing)."""
    b_sigs = [_head_signature(t, opts) for _, t in b_items]
    a_sigs = [_head_signature(t, opts) for _, t in a_items]
    script = ses(b_sigs, a_sigs)
    out: list[PatchNode] = []
    run_del: list[tuple[int, Term]] = []
    run_ins: list[tuple[int, Term]] = []

    def flush() -> None:
        used = [False] * len(run_ins)
        for i, bt in run_del:
            for slot, (j, at) in enumerate(run_ins):
                if not used[slot] and _pairable(bt, at, opts):
                    used[slot] = True
                    out.append(_diff_pair(bt, at, opts, diags, i, j))
                    break
            else:
                out.append(DeleteNode(bt, before_index=i))
        for slot, (j, at) in enumerate(run_ins):
            if not used[slot]:
                out.append(InsertNode(at, after_index=j))
        run_del.clear()
        run_ins.clear()

    for op in script.ops:
        if isinstance(op, SesKeep):
            flush()
            i, bt = b_items[op.before_index]
            j, at = a_items[op.after_index]
            out.append(_diff_pair(bt, at, opts, diags, i, j))
        elif isinstance(op, SesDelete):
            run_del.append(b_items[op.before_index])
        else:
            run_ins.append(a_items[op.after_index])
    flush()
    return out


def _diff_keyed_children(
    b_children: tuple[Term, ...],
    a_children: tuple[Term, ...],
    key_field: str,
    opts: DiffOptions,
    diags: list | None,
) -> list[PatchNode]:
    """Order-insensitive child matching by key text; duplicate keys pair
    positionally within their group; keyless children fall back to list
    alignment among themselves (with a diagnostic each)."""
    b_groups: dict[str, list[tuple[int, Term]]] = {}
    a_groups: dict[str, list[tuple[int, Term]]] = {}
    b_keyless: list[tuple[int, Term]] = []
    a_keyless: list[tuple[int, Term]] = []
    for idx, child in enumerate(b_children):
        key = _key_text(child, key_field)
        if key is None:
            b_keyless.append((idx, child))
            if diags is not None:
                diags.append(MissingKeyField(Side.BEFORE, idx, child.kind))
        else:
            b_groups.setdefault(key, []).append((idx, child))
    for idx, child in enumerate(a_children):
        key = _key_text(child, key_field)
        if key is None:
            a_keyless.append((idx, child))
            if diags is not None:
                diags.append(MissingKeyField(Side.AFTER, idx, child.kind))
        else:
            a_groups.setdefault(key, []).append((idx, child))

    out: list[PatchNode] = []
    for key, b_group in b_groups.items():
        a_group = a_groups.get(key, [])
        for (i, bt), (j, at) in zip(b_group, a_group):
            out.append(_diff_pair(bt, at, opts, diags, i, j))
        for i, bt in b_group[len(a_group):]:
            out.append(DeleteNode(bt, before_index=i))
    for key, a_group in a_groups.items():
        surplus = a_group[len(b_groups.get(key, [])):] if key in b_groups else a_group
        for j, at in surplus:
            out.append(InsertNode(at, after_index=j))
    out.extend(_align_sequence(b_keyless, a_keyless, opts, diags))
    return out


# ---------------------------------------------------------------------------
# move detection


def match_moves(
    unmatched_before: list[Term],
    unmatched_after: list[Term],
    opts: DiffOptions = DEFAULT_OPTIONS,
) -> list[tuple[Term, Term]]:
    """Greedy mutual-nearest-neighbor pairing of unmatched subtrees under
    relative feature-vector distance; accepted iff within the threshold."""
    pairs = _match_indices(unmatched_before, unmatched_after, opts)
    return [(unmatched_before[i], unmatched_after[j]) for i, j in pairs]


def _match_indices(
    befores: list[Term], afters: list[Term], opts: DiffOptions
) -> list[tuple[int, int]]:
    if not befores or not afters:
        return []
    fb = [feature_vector(t, opts) for t in befores]
    fa = [feature_vector(t, opts) for t in afters]
    dist: dict[tuple[int, int], float] = {}
    for i in range(len(fb)):
        for j in range(len(fa)):
            d = relative_distance(fb[i], fa[j])
            if d <= opts.similarity_threshold:
                dist[(i, j)] = d
    accepted: list[tuple[int, int]] = []
    free_b = set(range(len(fb)))
    free_a = set(range(len(fa)))
    while True:
        best_for_b: dict[int, tuple[float, int]] = {}
        best_for_a: dict[int, tuple[float, int]] = {}
        for (i, j), d in dist.items():
            if i not in free_b or j not in free_a:
                continue
            if i not in best_for_b or (d, j) < best_for_b[i]:
                best_for_b[i] = (d, j)
            if j not in best_for_a or (d, i) < best_for_a[j]:
                best_for_a[j] = (d, i)
        round_pairs = [
            (i, j)
            for i, (d, j) in sorted(best_for_b.items())
            if best_for_a.get(j, (None, None))[1] == i
        ]
        if not round_pairs:
            return sorted(accepted)
        for i, j in round_pairs:
            accepted.append((i, j))
            free_b.discard(i)
            free_a.discard(j)


def _mark_moves(root: PatchNode, opts: DiffOptions) -> None:
    deletes = [n for n in iter_patch(root) if isinstance(n, DeleteNode)]
    inserts = [n for n in iter_patch(root) if isinstance(n, InsertNode)]
    pairs = _match_indices([d.term for d in deletes], [i.term for i in inserts], opts)
    for group, (i, j) in enumerate(pairs):
        deletes[i].moved = True
        deletes[i].move_group = group
        inserts[j].moved = True
        inserts[j].move_group = group


# ---------------------------------------------------------------------------
# traversal and projection


def iter_patch(patch: PatchNode) -> Iterator[PatchNode]:
    """Pre-order over patch positions; Insert/Delete/Replace are leaves."""
    stack: list[PatchNode] = [patch]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, CopyNode):
            rest: list[PatchNode] = []
            for fd in node.fields:
                rest.extend(fd.slots)
            rest.extend(node.children)
            stack.extend(reversed(rest))


def patch_is_identity(patch: PatchNode) -> bool:
    """True when every position is a Copy and no parse status flipped.

    Span differences do not break identity: reformatting that leaves the
    shape alone is still "the same tree"."""
    for node in iter_patch(patch):
        if not isinstance(node, CopyNode):
            return False
        if node.before_error is not node.after_error:
            return False
    return True


def apply_patch(patch: PatchNode, side: Side) -> Term:
    """Project one side of a patch back into the exact input Term."""
    if side not in (Side.BEFORE, Side.AFTER):
        raise ValueError(f"side must be Before or After, got {side}")
    term = _project(patch, side is Side.BEFORE)
    if term is None:
        raise ValueError(f"patch has no {side.value} side")
    return term


def _slot_key(node: PatchNode, before: bool) -> int | None:
    if isinstance(node, CopyNode) or isinstance(node, ReplaceNode):
        return node.before_index if before else node.after_index
    if isinstance(node, DeleteNode):
        return node.before_index if before else None
    return None if before else node.after_index


def _project(node: PatchNode, before: bool) -> Term | None:
    if isinstance(node, DeleteNode):
        return node.term if before else None
    if isinstance(node, InsertNode):
        return None if before else node.term
    if isinstance(node, ReplaceNode):
        return node.before if before else node.after
    span = node.before_span if before else node.after_span
    error = node.before_error if before else node.after_error
    if node.text is not None:
        return Term(node.kind, span, node.text, error=error)
    by_name = {fd.name: fd for fd in node.fields}
    fields: list[tuple[str, tuple[Term, ...]]] = []
    order = node.before_field_order if before else node.after_field_order
    for name in order:
        fields.append((name, _project_sequence(by_name[name].slots, before)))
    children = _project_sequence(node.children, before)
    return Term(node.kind, span, None, tuple(fields), children, error)


def _project_sequence(slots: list[PatchNode], before: bool) -> tuple[Term, ...]:
    keyed: list[tuple[int, Term]] = []
    for slot in slots:
        term = _project(slot, before)
        if term is None:
            continue
        index = _slot_key(slot, before)
        assert index is not None, "sequence slots always carry side indices"
        keyed.append((index, term))
    keyed.sort(key=lambda pair: pair[0])
    return tuple(term for _, term in keyed)
