"""Command-line interface.

Subcommands: parse, diff, toc, tags, generate, serve.  stdout carries only
the payload; diagnostics go to stderr.  diff and toc follow the standard
diff-tool exit convention (0 same, 1 different, 2 trouble); parse and tags
use 0/1.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .backend import BackendUnavailable
from .codegen import (
    EmitterOptions,
    NameCollision,
    UnresolvedType,
    build_schema,
    emit_source,
    parse_node_types,
)
from .diff import (
    CopyNode,
    DeleteNode,
    InsertNode,
    ReplaceNode,
    SesTrace,
    diff_terms,
    iter_patch,
    patch_is_identity,
    render_git_patch,
    render_json,
    ses,
)
from .diff.render import patch_sexp
from .diff.traceplot import render_trace_svg
from .languages import LanguageDescriptor, Registry, UnknownLanguage, load_registry
from .parsing import parse_source
from .portable import FormatError, encode_portable, term_sexp
from .summary import entry_text, entry_to_obj, table_of_contents
from .tags import ctags_lines, extract_tags, tag_to_obj


class _Trouble(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _emit(text: str) -> None:
    """Payload to stdout; surrogateescape keeps undecodable source bytes."""
    if text and not text.endswith("\n"):
        text += "\n"
    sys.stdout.buffer.write(text.encode("utf-8", "surrogateescape"))
    sys.stdout.buffer.flush()


def _read_bytes(path: str, code: int) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _Trouble(f"cannot read {path}: {exc.strerror or exc}", code) from exc


def _language_for(registry: Registry, path: str, override: str | None, code: int) -> LanguageDescriptor:
    try:
        if override:
            return registry.language(override)
        return registry.for_path(path)
    except UnknownLanguage as exc:
        raise _Trouble(str(exc), code) from exc


def _parse(language: LanguageDescriptor, data: bytes, code: int):
    try:
        return parse_source(language, data)
    except BackendUnavailable as exc:
        raise _Trouble(str(exc), code) from exc


def _diff_options(language: LanguageDescriptor, args, code: int):
    overrides = {"move_detection": not args.no_moves}
    if args.threshold is not None:
        overrides["similarity_threshold"] = args.threshold
    try:
        return language.diff_options(**overrides)
    except ValueError as exc:
        raise _Trouble(str(exc), code) from exc


# ---------------------------------------------------------------------------
# text rendering of a patch (the diff command's summary format)


def _span_text(span) -> str:
    return f"{span.start_byte}..{span.end_byte}"


def _patch_lines(patch) -> list[str]:
    lines = []
    for node in iter_patch(patch):
        if isinstance(node, InsertNode):
            mark = "insert moved" if node.moved else "insert"
            lines.append(f"{mark} {node.term.kind} @after {_span_text(node.term.span)}")
        elif isinstance(node, DeleteNode):
            mark = "delete moved" if node.moved else "delete"
            lines.append(f"{mark} {node.term.kind} @before {_span_text(node.term.span)}")
        elif isinstance(node, ReplaceNode):
            lines.append(
                f"replace {node.before.kind} @before {_span_text(node.before.span)} "
                f"-> {node.after.kind} @after {_span_text(node.after.span)}"
            )
        elif isinstance(node, CopyNode) and node.text is not None:
            continue  # unchanged leaves stay silent
    return lines


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args, registry: Registry) -> int:
    language = _language_for(registry, args.file, args.language, code=1)
    data = _read_bytes(args.file, code=1)
    term = _parse(language, data, code=1)
    if args.format == "json":
        _emit(encode_portable(term))
    else:  # sexp / text
        _emit(term_sexp(term))
    return 0


def _diff_one(language: LanguageDescriptor, before: bytes, after: bytes, opts):
    return diff_terms(_parse(language, before, 2), _parse(language, after, 2), opts)


def _render_diff(patch, before: bytes, after: bytes, label: str, args) -> str:
    if args.format == "patch":
        return render_git_patch(
            patch,
            before,
            after,
            context=args.context,
            before_label=f"a/{label}",
            after_label=f"b/{label}",
        )
    if args.format == "json":
        return render_json(patch)
    if args.format == "sexp":
        return patch_sexp(patch)
    return "\n".join(_patch_lines(patch))


def _write_trace(before: bytes, after: bytes, path: str) -> None:
    trace = SesTrace()
    ses(before.splitlines(keepends=True), after.splitlines(keepends=True), trace=trace)
    render_trace_svg(trace, path)


def _diff_directory(args, registry: Registry) -> int:
    before_root, after_root = Path(args.before), Path(args.after)
    rels = sorted(
        {
            p.relative_to(root).as_posix()
            for root, other in ((before_root, after_root), (after_root, before_root))
            for p in root.rglob("*")
            if p.is_file()
        }
    )
    changed = False
    chunks: list[str] = []

    def work(rel: str):
        b_path, a_path = before_root / rel, after_root / rel
        if not b_path.exists() or not a_path.exists():
            side = "only in after" if a_path.exists() else "only in before"
            return rel, None, f"{side}: {rel}"
        language = _language_for(registry, rel, args.language, code=2)
        before, after = b_path.read_bytes(), a_path.read_bytes()
        patch = _diff_one(language, before, after, _diff_options(language, args, 2))
        if patch_is_identity(patch):
            return rel, False, ""
        return rel, True, _render_diff(patch, before, after, rel, args)

    with ThreadPoolExecutor() as pool:
        results = list(pool.map(work, rels))
    for rel, state, payload in results:
        if state is None:
            print(payload, file=sys.stderr)
            changed = True
        elif state:
            changed = True
            if payload:
                header = "" if args.format == "patch" else f"== {rel}\n"
                chunks.append(header + payload)
    if chunks:
        _emit("\n".join(chunks))
    return 1 if changed else 0


def cmd_diff(args, registry: Registry) -> int:
    if Path(args.before).is_dir() and Path(args.after).is_dir():
        if args.trace_svg:
            raise _Trouble("--trace-svg applies to single-file diffs", 2)
        return _diff_directory(args, registry)
    language = _language_for(registry, args.before, args.language, code=2)
    if not args.language:
        other = _language_for(registry, args.after, None, code=2)
        if other.language_id != language.language_id:
            raise _Trouble(
                f"files resolve to different languages "
                f"({language.language_id} vs {other.language_id}); use --language",
                2,
            )
    before = _read_bytes(args.before, code=2)
    after = _read_bytes(args.after, code=2)
    patch = _diff_one(language, before, after, _diff_options(language, args, 2))
    if args.trace_svg:
        _write_trace(before, after, args.trace_svg)
    if patch_is_identity(patch):
        return 0
    _emit(_render_diff(patch, before, after, args.after, args))
    return 1


def cmd_toc(args, registry: Registry) -> int:
    language = _language_for(registry, args.before, args.language, code=2)
    before = _read_bytes(args.before, code=2)
    after = _read_bytes(args.after, code=2)
    patch = _diff_one(language, before, after, _diff_options(language, args, 2))
    entries = table_of_contents(
        patch, language.declaration_rules, args.after, include_enclosing=args.include_enclosing
    )
    if args.format == "json":
        _emit(json.dumps([entry_to_obj(e) for e in entries], ensure_ascii=False))
    elif entries:
        _emit("\n".join(entry_text(e) for e in entries))
    return 0 if patch_is_identity(patch) else 1


def cmd_tags(args, registry: Registry) -> int:
    language = _language_for(registry, args.file, args.language, code=1)
    data = _read_bytes(args.file, code=1)
    term = _parse(language, data, code=1)
    tags = extract_tags(term, language.tag_rules, data)
    if args.format == "json":
        _emit(json.dumps([tag_to_obj(t) for t in tags], ensure_ascii=False))
    else:
        _emit("\n".join(ctags_lines(tags, args.file)))
    return 0


def cmd_generate(args, registry: Registry) -> int:
    doc = _read_bytes(args.node_types, code=2)
    try:
        schema = build_schema(
            parse_node_types(doc), synthesize_missing=args.allow_undeclared
        )
        files = emit_source(
            schema,
            EmitterOptions(module_name=args.module_name, grammar_name=args.grammar),
        )
    except (FormatError, UnresolvedType, NameCollision, ValueError) as exc:
        raise _Trouble(str(exc), 2) from exc
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files:
        (out_dir / name).write_text(text, encoding="utf-8")
        print(f"wrote {out_dir / name}", file=sys.stderr)
    return 0


def cmd_serve(args, registry: Registry) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        host=args.host,
        port=args.port,
        store_path=args.store,
        registry_config=args.config or os.environ.get("SEMASCOPE_CONFIG") or None,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_diff_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=float, default=None,
                        help="move-match similarity threshold in [0, 1]")
    parser.add_argument("--no-moves", action="store_true",
                        help="disable move detection")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semascope",
        description="Syntax-aware parsing, diffing, and symbol tagging.",
    )
    parser.add_argument("--config", default=None,
                        help="language registry config (INI); SEMASCOPE_CONFIG is the fallback")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a file and print its tree")
    p.add_argument("file")
    p.add_argument("--language")
    p.add_argument("--format", choices=["json", "sexp", "text"], default="json")
    p.set_defaults(handler=cmd_parse)

    d = sub.add_parser("diff", help="structural diff of two files or directories")
    d.add_argument("before")
    d.add_argument("after")
    d.add_argument("--language")
    d.add_argument("--format", choices=["text", "json", "patch", "sexp"], default="text")
    d.add_argument("--context", type=int, default=3, help="context lines for --format patch")
    d.add_argument("--trace-svg", default=None, metavar="PATH",
                   help="render the line-level search trace as SVG")
    _add_diff_flags(d)
    d.set_defaults(handler=cmd_diff)

    t = sub.add_parser("toc", help="table of contents of changed declarations")
    t.add_argument("before")
    t.add_argument("after")
    t.add_argument("--language")
    t.add_argument("--format", choices=["text", "json"], default="text")
    t.add_argument("--include-enclosing", action="store_true",
                   help="also mark enclosing declarations of each change")
    _add_diff_flags(t)
    t.set_defaults(handler=cmd_toc)

    g = sub.add_parser("tags", help="extract definition/reference tags")
    g.add_argument("file")
    g.add_argument("--language")
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.set_defaults(handler=cmd_tags)

    c = sub.add_parser("generate", help="generate typed syntax from node-types metadata")
    c.add_argument("node_types", help="path to the grammar's node-types.json")
    c.add_argument("out_dir")
    c.add_argument("--module-name", default="syntax")
    c.add_argument("--grammar", default=None, help="grammar name for the module header")
    c.add_argument("--allow-undeclared", action="store_true",
                   help="synthesize terminals for referenced-but-undeclared types")
    c.set_defaults(handler=cmd_generate)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8134)
    s.add_argument("--store", default="semascope.db")
    s.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    trouble = 2 if args.command in ("diff", "toc", "generate") else 1
    try:
        registry = load_registry(args.config or os.environ.get("SEMASCOPE_CONFIG") or None)
    except (OSError, ValueError, configparser.Error) as exc:
        print(f"semascope: {exc}", file=sys.stderr)
        return trouble
    try:
        return args.handler(args, registry)
    except _Trouble as exc:
        print(f"semascope: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
