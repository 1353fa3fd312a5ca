"""Portable tree interchange: a canonical JSON form for Terms.

Every node serializes as an object with keys in fixed order:

    {"kind": str, "span": [sb, eb, sr, sc, er, ec], "error": "ok"|"error"|"missing",
     "text": str (leaves only), "fields": [[name, [node, ...]], ...], "children": [node, ...]}

Encoding is canonical (compact separators, fixed key order) so equal trees
produce byte-identical documents.  Decoding validates structure and spans and
reports the JSON path of the first violation.
"""
from __future__ import annotations

import json
from typing import Any

from .syntax import ErrorStatus, InvalidTermError, SourceSpan, Term, validate_term


class FormatError(ValueError):
    """A portable document failed validation; .path points at the violation."""

    def __init__(self, message: str, path: str = "$") -> None:
        super().__init__(f"{message} at {path}")
        self.path = path


_STATUS_NAMES = {status.value: status for status in ErrorStatus}


def term_to_obj(term: Term) -> dict[str, Any]:
    """Term -> plain JSON-ready objects, iteratively."""
    # frame: [term, slots, next_index, built]; slots pair each child with its
    # field name (None = anonymous) so assembly can rebuild the field map.
    slots = _slots(term)
    stack: list[list] = [[term, slots, 0, []]]
    while True:
        frame = stack[-1]
        node, slots, i, built = frame
        if i < len(slots):
            frame[2] = i + 1
            child = slots[i][1]
            stack.append([child, _slots(child), 0, []])
            continue
        stack.pop()
        obj = _assemble_obj(node, slots, built)
        if not stack:
            return obj
        stack[-1][3].append(obj)


def _slots(term: Term) -> list[tuple[str | None, Term]]:
    out: list[tuple[str | None, Term]] = [
        (name, t) for name, terms in term.fields for t in terms
    ]
    out.extend((None, t) for t in term.children)
    return out


def _assemble_obj(node: Term, slots: list, built: list) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "kind": node.kind,
        "span": list(node.span.as_tuple()),
        "error": node.error.value,
    }
    if node.text is not None:
        obj["text"] = node.text
    fields: list[list] = []
    children: list[Any] = []
    for (name, _), child_obj in zip(slots, built):
        if name is None:
            children.append(child_obj)
            continue
        for entry in fields:
            if entry[0] == name:
                entry[1].append(child_obj)
                break
        else:
            fields.append([name, [child_obj]])
    obj["fields"] = fields
    obj["children"] = children
    return obj


def encode_portable(term: Term) -> str:
    return json.dumps(term_to_obj(term), ensure_ascii=False, separators=(",", ":"))


def term_from_obj(obj: Any) -> Term:
    """Plain objects -> Term, validating as it goes."""
    # frame: [obj, path, slots, next_index, built]; slots hold (name, child_obj,
    # child_path) for fields first, then anonymous children.
    stack: list[list] = [[obj, "$", _check_node(obj, "$"), 0, []]]
    while True:
        frame = stack[-1]
        node_obj, path, slots, i, built = frame
        if i < len(slots):
            frame[3] = i + 1
            _, child_obj, child_path = slots[i]
            stack.append([child_obj, child_path, _check_node(child_obj, child_path), 0, []])
            continue
        stack.pop()
        term = _assemble_term(node_obj, path, slots, built)
        if not stack:
            try:
                validate_term(term)
            except InvalidTermError as exc:
                raise FormatError(str(exc), exc.path) from exc
            return term
        stack[-1][4].append(term)


def _check_node(obj: Any, path: str) -> list[tuple[str | None, Any, str]]:
    """Validate one node object shallowly; return its child slots."""
    if not isinstance(obj, dict):
        raise FormatError("node must be an object", path)
    unknown = set(obj) - {"kind", "span", "error", "text", "fields", "children"}
    if unknown:
        raise FormatError(f"unknown keys {sorted(unknown)}", path)
    if not isinstance(obj.get("kind"), str):
        raise FormatError("kind must be a string", path + ".kind")
    span = obj.get("span")
    if (
        not isinstance(span, list)
        or len(span) != 6
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in span)
    ):
        raise FormatError("span must be six integers", path + ".span")
    if obj.get("error") not in _STATUS_NAMES:
        raise FormatError('error must be "ok", "error", or "missing"', path + ".error")
    if "text" in obj and not isinstance(obj["text"], str):
        raise FormatError("text must be a string", path + ".text")
    fields = obj.get("fields", [])
    if not isinstance(fields, list):
        raise FormatError("fields must be an array", path + ".fields")
    slots: list[tuple[str | None, Any, str]] = []
    seen: set[str] = set()
    for fi, entry in enumerate(fields):
        fpath = f"{path}.fields[{fi}]"
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
            raise FormatError("field entry must be [name, [node, ...]]", fpath)
        name, members = entry
        if name in seen:
            raise FormatError(f"duplicate field name {name!r}", fpath)
        seen.add(name)
        if not isinstance(members, list):
            raise FormatError("field members must be an array", fpath + "[1]")
        for mi, member in enumerate(members):
            slots.append((name, member, f"{fpath}[1][{mi}]"))
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise FormatError("children must be an array", path + ".children")
    for ci, child in enumerate(children):
        slots.append((None, child, f"{path}.children[{ci}]"))
    if "text" in obj and slots:
        raise FormatError("leaf node cannot carry fields or children", path)
    return slots


def _assemble_term(obj: dict, path: str, slots: list, built: list) -> Term:
    try:
        span = SourceSpan.from_tuple(obj["span"])
    except ValueError as exc:
        raise FormatError(str(exc), path + ".span") from exc
    fields: list[tuple[str, list[Term]]] = []
    children: list[Term] = []
    for (name, _, _), term in zip(slots, built):
        if name is None:
            children.append(term)
            continue
        for entry_name, bucket in fields:
            if entry_name == name:
                bucket.append(term)
                break
        else:
            fields.append((name, [term]))
    return Term(
        kind=obj["kind"],
        span=span,
        text=obj.get("text"),
        fields=tuple((name, tuple(bucket)) for name, bucket in fields),
        children=tuple(children),
        error=_STATUS_NAMES[obj["error"]],
    )


def decode_portable(document: str | bytes) -> Term:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}")
    return term_from_obj(obj)


def term_sexp(term: Term) -> str:
    """Indented s-expression rendering; leaves quote their text, and nodes
    with parse trouble carry a !error / !missing marker."""
    from .syntax import child_terms  # local import keeps module load light

    lines: list[str] = []
    # frame: [node, children or None, next index]; depth = open frame count
    stack: list[list] = [[term, None, 0]]
    while stack:
        frame = stack[-1]
        node, kids, i = frame
        if kids is None:
            label = node.kind
            if node.error is not ErrorStatus.OK:
                label = f"{label} !{node.error.value}"
            indent = "  " * (len(stack) - 1)
            if node.is_leaf:
                lines.append(
                    f"{indent}({label} {json.dumps(node.text, ensure_ascii=False)})"
                )
                stack.pop()
                continue
            kids = child_terms(node)
            if not kids:
                lines.append(f"{indent}({label})")
                stack.pop()
                continue
            lines.append(f"{indent}({label}")
            frame[1] = kids
            continue
        if i < len(kids):
            frame[2] = i + 1
            stack.append([kids[i], None, 0])
            continue
        stack.pop()
        lines[-1] += ")"
    return "\n".join(lines)
