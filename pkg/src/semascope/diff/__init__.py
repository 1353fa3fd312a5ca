"""Tree diffing: SES alignment, feature-vector matching, patch rendering."""
from .engine import (
    CopyNode,
    DeleteNode,
    DiffOptions,
    FieldDiff,
    InsertNode,
    MissingKeyField,
    PatchNode,
    PatchTree,
    ReplaceNode,
    apply_patch,
    diff_keyed,
    diff_terms,
    iter_patch,
    match_moves,
    patch_is_identity,
)
from .grams import distance, feature_vector, pq_grams, relative_distance
from .myers import Delete, EditOp, EditScript, Insert, Keep, SesTrace, replay, ses
from .render import (
    SpanOutOfBounds,
    parse_patch_json,
    patch_from_obj,
    patch_sexp,
    patch_to_obj,
    render_git_patch,
    render_json,
)
from .traceplot import render_trace_svg

__all__ = [
    "CopyNode",
    "Delete",
    "DeleteNode",
    "DiffOptions",
    "EditOp",
    "EditScript",
    "FieldDiff",
    "Insert",
    "InsertNode",
    "Keep",
    "MissingKeyField",
    "PatchNode",
    "PatchTree",
    "ReplaceNode",
    "SesTrace",
    "SpanOutOfBounds",
    "apply_patch",
    "diff_keyed",
    "diff_terms",
    "distance",
    "feature_vector",
    "iter_patch",
    "match_moves",
    "parse_patch_json",
    "patch_from_obj",
    "patch_is_identity",
    "patch_sexp",
    "patch_to_obj",
    "pq_grams",
    "relative_distance",
    "render_git_patch",
    "render_json",
    "render_trace_svg",
    "replay",
    "ses",
]
