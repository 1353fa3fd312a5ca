"""Parse source bytes into Terms via a registered language backend.

Parsing is total over byte strings: malformed input yields a tree containing
error or missing nodes rather than an exception.  Each call builds its own
parser instance, so concurrent callers never share mutable backend state.
"""
from __future__ import annotations

from .backend import BackendUnavailable, TSNode, load_language
from .languages import LanguageDescriptor
from .syntax import (
    DEFAULT_UNFOLD_DEPTH,
    ErrorStatus,
    NodeData,
    SourceSpan,
    Term,
    unfold,
)

__all__ = ["parse_source", "parse_text", "BackendUnavailable"]


def _depth_budget(source: bytes) -> int:
    # Deeply nested input (e.g. "[[[[...") produces a tree about as deep as
    # the source is long; leave the guard rail well above that.
    return max(DEFAULT_UNFOLD_DEPTH, 2 * len(source) + 16)


def parse_source(language: LanguageDescriptor, source: bytes) -> Term:
    """Parse raw bytes under the grammar named by `language`."""
    if not isinstance(source, bytes):
        raise TypeError(f"source must be bytes, got {type(source).__name__}")
    lang = load_language(language.backend.resolve_path(), language.backend.symbol)
    rt = lang.runtime

    def seed_children(node: TSNode) -> tuple[NodeData, list[TSNode]]:
        kind_raw = rt.ts_node_type(node)
        kind = kind_raw.decode("utf-8", "replace") if kind_raw else ""
        start = rt.ts_node_start_byte(node)
        end = rt.ts_node_end_byte(node)
        sp = rt.ts_node_start_point(node)
        ep = rt.ts_node_end_point(node)
        span = SourceSpan(start, end, (sp.row, sp.column), (ep.row, ep.column))
        if rt.ts_node_is_missing(node):
            status = ErrorStatus.MISSING
        elif rt.ts_node_is_error(node):
            status = ErrorStatus.ERROR
        else:
            status = ErrorStatus.OK
        count = rt.ts_node_child_count(node)
        if count == 0:
            text = source[start:end].decode("utf-8", "replace")
            return NodeData(kind, span, text=text, error=status), []
        fields = []
        children = []
        for i in range(count):
            children.append(rt.ts_node_child(node, i))
            name = rt.ts_node_field_name_for_child(node, i)
            fields.append(name.decode("utf-8", "replace") if name else None)
        data = NodeData(kind, span, error=status, child_fields=tuple(fields))
        return data, children

    parser = rt.ts_parser_new()
    if not parser:
        raise BackendUnavailable("backend failed to allocate a parser")
    try:
        if not rt.ts_parser_set_language(parser, lang.handle):
            raise BackendUnavailable(
                f"backend rejected grammar {language.language_id!r}"
            )
        tree = rt.ts_parser_parse_string(parser, None, source, len(source))
        if not tree:
            raise BackendUnavailable("backend returned no tree")
        try:
            root = rt.ts_tree_root_node(tree)
            return unfold(root, seed_children, max_depth=_depth_budget(source))
        finally:
            rt.ts_tree_delete(tree)
    finally:
        rt.ts_parser_delete(parser)


def parse_text(language: LanguageDescriptor, text: str) -> Term:
    """Convenience wrapper: UTF-8 encode and parse."""
    return parse_source(language, text.encode("utf-8"))
