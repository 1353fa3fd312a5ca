"""Patch output: canonical JSON and git-compatible unified diffs.

The JSON form is self-contained (ops carry their subtrees in portable form)
so it decodes back to an equal patch.  The unified-diff renderer works from
the patch's copied leaves: they anchor equal byte segments between the two
sources, lines are matched only when both sides are complete lines of the
same segment, and everything unmatched becomes hunk material.  Matched
context is byte-identical on both sides by construction, which is what makes
the output apply cleanly.
"""
from __future__ import annotations

import json
from bisect import bisect_left
from typing import Any

from ..portable import FormatError, term_from_obj, term_to_obj
from ..syntax import ErrorStatus, SourceSpan
from .engine import (
    CopyNode,
    DeleteNode,
    FieldDiff,
    InsertNode,
    PatchNode,
    ReplaceNode,
    iter_patch,
)


class SpanOutOfBounds(ValueError):
    """A patch span does not index into the supplied source bytes."""


# ---------------------------------------------------------------------------
# JSON


def patch_to_obj(node: PatchNode) -> dict[str, Any]:
    if isinstance(node, CopyNode):
        obj: dict[str, Any] = {
            "op": "copy",
            "kind": node.kind,
            "before_span": list(node.before_span.as_tuple()),
            "after_span": list(node.after_span.as_tuple()),
        }
        if node.text is not None:
            obj["text"] = node.text
        if node.before_error is not ErrorStatus.OK:
            obj["before_error"] = node.before_error.value
        if node.after_error is not ErrorStatus.OK:
            obj["after_error"] = node.after_error.value
        _put_indices(obj, node.before_index, node.after_index)
        if node.text is None:
            obj["before_field_order"] = list(node.before_field_order)
            obj["after_field_order"] = list(node.after_field_order)
            obj["fields"] = [
                [fd.name, [patch_to_obj(s) for s in fd.slots]] for fd in node.fields
            ]
            obj["children"] = [patch_to_obj(c) for c in node.children]
        return obj
    if isinstance(node, InsertNode):
        obj = {"op": "insert", "kind": node.term.kind, "after_span": list(node.term.span.as_tuple())}
        if node.moved:
            obj["moved"] = True
            obj["move_group"] = node.move_group
        _put_indices(obj, None, node.after_index)
        obj["term"] = term_to_obj(node.term)
        return obj
    if isinstance(node, DeleteNode):
        obj = {"op": "delete", "kind": node.term.kind, "before_span": list(node.term.span.as_tuple())}
        if node.moved:
            obj["moved"] = True
            obj["move_group"] = node.move_group
        _put_indices(obj, node.before_index, None)
        obj["term"] = term_to_obj(node.term)
        return obj
    obj = {
        "op": "replace",
        "kind": node.after.kind,
        "before_span": list(node.before.span.as_tuple()),
        "after_span": list(node.after.span.as_tuple()),
    }
    _put_indices(obj, node.before_index, node.after_index)
    obj["before"] = term_to_obj(node.before)
    obj["after"] = term_to_obj(node.after)
    return obj


def _put_indices(obj: dict, bi: int | None, ai: int | None) -> None:
    if bi is not None:
        obj["before_index"] = bi
    if ai is not None:
        obj["after_index"] = ai


def render_json(patch: PatchNode) -> str:
    return json.dumps(patch_to_obj(patch), ensure_ascii=False, separators=(",", ":"))


def patch_from_obj(obj: Any, path: str = "$") -> PatchNode:
    if not isinstance(obj, dict) or "op" not in obj:
        raise FormatError("patch node must be an object with an op", path)
    op = obj["op"]
    try:
        if op == "copy":
            node = CopyNode(
                kind=obj["kind"],
                before_span=SourceSpan.from_tuple(obj["before_span"]),
                after_span=SourceSpan.from_tuple(obj["after_span"]),
                text=obj.get("text"),
                before_error=ErrorStatus(obj.get("before_error", "ok")),
                after_error=ErrorStatus(obj.get("after_error", "ok")),
                before_index=obj.get("before_index"),
                after_index=obj.get("after_index"),
            )
            if node.text is None:
                node.before_field_order = tuple(obj.get("before_field_order", ()))
                node.after_field_order = tuple(obj.get("after_field_order", ()))
                node.fields = [
                    FieldDiff(
                        name,
                        [patch_from_obj(s, f"{path}.fields[{name}][{i}]") for i, s in enumerate(slots)],
                        name in node.before_field_order,
                        name in node.after_field_order,
                    )
                    for name, slots in obj.get("fields", [])
                ]
                node.children = [
                    patch_from_obj(c, f"{path}.children[{i}]")
                    for i, c in enumerate(obj.get("children", []))
                ]
            return node
        if op == "insert":
            return InsertNode(
                term=term_from_obj(obj["term"]),
                after_index=obj.get("after_index"),
                moved=bool(obj.get("moved", False)),
                move_group=obj.get("move_group"),
            )
        if op == "delete":
            return DeleteNode(
                term=term_from_obj(obj["term"]),
                before_index=obj.get("before_index"),
                moved=bool(obj.get("moved", False)),
                move_group=obj.get("move_group"),
            )
        if op == "replace":
            return ReplaceNode(
                before=term_from_obj(obj["before"]),
                after=term_from_obj(obj["after"]),
                before_index=obj.get("before_index"),
                after_index=obj.get("after_index"),
            )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad patch node: {exc}", path) from exc
    raise FormatError(f"unknown op {op!r}", path)


def parse_patch_json(document: str | bytes) -> PatchNode:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}")
    return patch_from_obj(obj)


# ---------------------------------------------------------------------------
# unified diff


def render_git_patch(
    patch: PatchNode,
    before_src: bytes,
    after_src: bytes,
    context: int = 3,
    before_label: str = "a/file",
    after_label: str = "b/file",
) -> str:
    """Unified diff whose application to before_src reproduces after_src.

    Identical sources yield the empty string."""
    if context < 0:
        raise ValueError("context must be non-negative")
    anchors = _anchors(patch, before_src, after_src)
    segments = _equal_segments(anchors, before_src, after_src)
    lines_b = _line_ranges(before_src)
    lines_a = _line_ranges(after_src)
    pairs = _matched_lines(segments, lines_b, lines_a)
    blocks = _change_blocks(pairs, len(lines_b), len(lines_a))
    if not blocks:
        return ""
    out: list[str] = [f"--- {before_label}\n", f"+++ {after_label}\n"]
    for hunk in _group_hunks(blocks, context):
        out.extend(_render_hunk(hunk, context, before_src, after_src, lines_b, lines_a))
    return "".join(out)


def _anchors(
    patch: PatchNode, before_src: bytes, after_src: bytes
) -> list[tuple[int, int, int, int]]:
    """(b_start, b_end, a_start, a_end) for copied leaves whose raw bytes
    agree, ordered by before offset, monotone in after offset (LIS)."""
    raw: list[tuple[int, int, int, int]] = []
    for node in iter_patch(patch):
        if not isinstance(node, CopyNode) or node.text is None:
            continue
        bs, be = node.before_span.start_byte, node.before_span.end_byte
        as_, ae = node.after_span.start_byte, node.after_span.end_byte
        if be > len(before_src) or ae > len(after_src):
            raise SpanOutOfBounds(
                f"span {max(be, ae)} exceeds source of "
                f"{len(before_src)}/{len(after_src)} bytes"
            )
        if bs == be and as_ == ae:
            continue  # zero-width (missing) leaves anchor nothing
        if before_src[bs:be] != after_src[as_:ae]:
            continue  # differs at byte level despite equal decoded text
        raw.append((bs, be, as_, ae))
    raw.sort()
    return _longest_increasing(raw)


def _longest_increasing(anchors: list[tuple[int, int, int, int]]) -> list:
    """Longest subsequence strictly increasing in after offset (patience)."""
    if not anchors:
        return []
    tails: list[int] = []  # indices into anchors
    prev = [-1] * len(anchors)
    keys: list[int] = []
    for idx, anchor in enumerate(anchors):
        key = anchor[2]
        pos = bisect_left(keys, key)
        if pos == len(keys):
            keys.append(key)
            tails.append(idx)
        else:
            keys[pos] = key
            tails[pos] = idx
        prev[idx] = tails[pos - 1] if pos > 0 else -1
    out = []
    idx = tails[-1]
    while idx != -1:
        out.append(anchors[idx])
        idx = prev[idx]
    out.reverse()
    return out


def _equal_segments(
    anchors: list[tuple[int, int, int, int]], before_src: bytes, after_src: bytes
) -> list[tuple[int, int, int, int]]:
    """Maximal byte ranges equal on both sides: anchors plus equal gaps."""
    segments: list[list[int]] = []

    def add_equal(b0: int, b1: int, a0: int, a1: int) -> None:
        if b1 <= b0 and a1 <= a0:
            return
        if segments and segments[-1][1] == b0 and segments[-1][3] == a0:
            segments[-1][1] = b1
            segments[-1][3] = a1
        else:
            segments.append([b0, b1, a0, a1])

    pb = pa = 0
    for bs, be, as_, ae in anchors:
        if before_src[pb:bs] == after_src[pa:as_]:
            add_equal(pb, bs, pa, as_)
        add_equal(bs, be, as_, ae)
        pb, pa = be, ae
    if before_src[pb:] == after_src[pa:]:
        add_equal(pb, len(before_src), pa, len(after_src))
    return [tuple(s) for s in segments]


def _line_ranges(src: bytes) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    start = 0
    while start < len(src):
        nl = src.find(b"\n", start)
        if nl == -1:
            out.append((start, len(src)))
            break
        out.append((start, nl + 1))
        start = nl + 1
    return out


def _matched_lines(
    segments: list[tuple[int, int, int, int]],
    lines_b: list[tuple[int, int]],
    lines_a: list[tuple[int, int]],
) -> list[tuple[int, int]]:
    """Line index pairs (before, after) whose full byte ranges correspond
    inside one equal segment; such lines are byte-identical."""
    a_by_start = {start: i for i, (start, _) in enumerate(lines_a)}
    starts_b = [start for start, _ in lines_b]
    pairs: list[tuple[int, int]] = []
    for b0, b1, a0, a1 in segments:
        delta = a0 - b0
        li = bisect_left(starts_b, b0)
        while li < len(lines_b) and lines_b[li][1] <= b1:
            s, e = lines_b[li]
            j = a_by_start.get(s + delta)
            if j is not None and lines_a[j] == (s + delta, e + delta):
                pairs.append((li, j))
            li += 1
    return pairs


def _change_blocks(
    pairs: list[tuple[int, int]], count_b: int, count_a: int
) -> list[tuple[int, int, int, int]]:
    """Half-open unmatched line ranges (b_lo, b_hi, a_lo, a_hi)."""
    blocks: list[tuple[int, int, int, int]] = []
    next_b = next_a = 0
    for lb, la in pairs:
        if lb > next_b or la > next_a:
            blocks.append((next_b, lb, next_a, la))
        next_b, next_a = lb + 1, la + 1
    if count_b > next_b or count_a > next_a:
        blocks.append((next_b, count_b, next_a, count_a))
    return blocks


def _group_hunks(
    blocks: list[tuple[int, int, int, int]], context: int
) -> list[list[tuple[int, int, int, int]]]:
    hunks: list[list[tuple[int, int, int, int]]] = [[blocks[0]]]
    for blk in blocks[1:]:
        if blk[0] - hunks[-1][-1][1] <= 2 * context:
            hunks[-1].append(blk)
        else:
            hunks.append([blk])
    return hunks


def _render_hunk(
    hunk: list[tuple[int, int, int, int]],
    context: int,
    before_src: bytes,
    after_src: bytes,
    lines_b: list[tuple[int, int]],
    lines_a: list[tuple[int, int]],
) -> list[str]:
    lead = min(context, hunk[0][0])
    trail = min(context, len(lines_b) - hunk[-1][1])
    b_from = hunk[0][0] - lead
    a_from = hunk[0][2] - lead
    b_to = hunk[-1][1] + trail
    a_to = hunk[-1][3] + trail
    body: list[str] = []
    cur_b, cur_a = b_from, a_from
    for b_lo, b_hi, a_lo, a_hi in hunk:
        for li in range(cur_b, b_lo):  # matched context before the block
            body.append(_payload(" ", li, lines_b, before_src))
        for li in range(b_lo, b_hi):
            body.append(_payload("-", li, lines_b, before_src))
        for li in range(a_lo, a_hi):
            body.append(_payload("+", li, lines_a, after_src))
        cur_b, cur_a = b_hi, a_hi
    for li in range(cur_b, b_to):
        body.append(_payload(" ", li, lines_b, before_src))
    header = f"@@ -{_range_text(b_from, b_to - b_from)} +{_range_text(a_from, a_to - a_from)} @@\n"
    return [header] + body


def _range_text(start: int, count: int) -> str:
    if count == 0:
        return f"{start},0"
    return f"{start + 1},{count}"


def _payload(prefix: str, li: int, lines: list[tuple[int, int]], src: bytes) -> str:
    start, end = lines[li]
    raw = src[start:end]
    missing_nl = not raw.endswith(b"\n")
    text = raw.decode("utf-8", errors="surrogateescape")
    if missing_nl:
        return f"{prefix}{text}\n\\ No newline at end of file\n"
    return f"{prefix}{text[:-1]}\n"

# ---------------------------------------------------------------------------
# s-expression rendering


def _sexp_label(node: PatchNode) -> str:
    if isinstance(node, CopyNode):
        return f"copy {node.kind}"
    if isinstance(node, ReplaceNode):
        return "replace"
    op = "insert" if isinstance(node, InsertNode) else "delete"
    if node.moved:
        group = "" if node.move_group is None else f" {node.move_group}"
        return f"{op} moved{group}"
    return op


def patch_sexp(patch: PatchNode) -> str:
    """Indented s-expression of a patch; carried subtrees render inline."""
    from ..portable import term_sexp

    def assemble(node: PatchNode, rendered: list[str]) -> str:
        label = _sexp_label(node)
        if isinstance(node, InsertNode) or isinstance(node, DeleteNode):
            rendered = [term_sexp(node.term)]
        elif isinstance(node, ReplaceNode):
            rendered = [term_sexp(node.before), term_sexp(node.after)]
        if not rendered:
            return f"({label})"
        inner = "\n".join("  " + line for part in rendered for line in part.split("\n"))
        return f"({label}\n{inner})"

    # frame: [node, children, next index, rendered children]
    stack: list[list] = [[patch, _copy_children(patch), 0, []]]
    while True:
        frame = stack[-1]
        node, kids, i, built = frame
        if i < len(kids):
            frame[2] = i + 1
            child = kids[i]
            stack.append([child, _copy_children(child), 0, []])
            continue
        stack.pop()
        text = assemble(node, built)
        if not stack:
            return text
        stack[-1][3].append(text)


def _copy_children(node: PatchNode) -> list[PatchNode]:
    if not isinstance(node, CopyNode):
        return []
    kids: list[PatchNode] = []
    for fd in node.fields:
        kids.extend(fd.slots)
    kids.extend(node.children)
    return kids
