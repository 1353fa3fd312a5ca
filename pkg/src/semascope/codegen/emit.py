"""Source emission: schema entries to a typed-syntax Python module.

Output is deterministic text: one frozen dataclass per terminal/product,
one union alias per sum, decode tables, and a decode() entry point bound to
the generic decoder.  A JSON manifest records the grammar-name to
Python-name mapping.
"""
from __future__ import annotations

import json
import keyword
from dataclasses import dataclass

from .runtime import Cardinality
from .schema import TOKEN_TYPE, FieldIR, Product, SchemaIR, Sum, Terminal

__all__ = ["EmitterOptions", "NameCollision", "emit_source"]

# Names the generated module claims before any grammar type is declared.
_RESERVED = frozenset(
    {
        "annotations",
        "dataclass",
        "Cardinality",
        "Err",
        "ProductSpec",
        "SlotSpec",
        "TerminalSpec",
        "decode_term",
        "SourceSpan",
        "Term",
        "NAMED_KINDS",
        "NODE_SPECS",
        "decode",
    }
)


class NameCollision(ValueError):
    """Two schema entries (or an entry and a reserved name) map to the same
    Python identifier after mangling."""


@dataclass(frozen=True)
class EmitterOptions:
    module_name: str = "syntax"
    grammar_name: str | None = None  # for the header; defaults to module_name
    runtime_module: str = "semascope.codegen.runtime"
    syntax_module: str = "semascope.syntax"


def _class_name(grammar_name: str) -> str:
    parts = [p for p in grammar_name.strip("_").split("_") if p]
    name = "".join(p[:1].upper() + p[1:] for p in parts) or "Tok"
    if not name.isidentifier():
        name = "T_" + "".join(c for c in name if c.isalnum() or c == "_")
    if keyword.iskeyword(name):
        name += "_"
    return name


def _name_map(schema: SchemaIR) -> dict[str, str]:
    mapping: dict[str, str] = {}
    owners: dict[str, str] = {}
    for entry in schema.entries:
        python = "Token" if entry.name == TOKEN_TYPE else _class_name(entry.name)
        if python in _RESERVED:
            raise NameCollision(f"{entry.name!r} maps to reserved name {python!r}")
        if python in owners:
            raise NameCollision(
                f"{entry.name!r} and {owners[python]!r} both map to {python!r}"
            )
        owners[python] = entry.name
        mapping[entry.name] = python
    return mapping


def _sorted_set_literal(kinds: frozenset[str], indent: str) -> str:
    if not kinds:
        return "frozenset()"
    items = sorted(kinds)
    inline = ", ".join(repr(k) for k in items)
    if len(inline) <= 60:
        return f"frozenset({{{inline}}})"
    body = "".join(f"{indent}    {k!r},\n" for k in items)
    return "frozenset({\n" + body + indent + "})"


def _payload_annotation(field: FieldIR, names: dict[str, str]) -> str:
    inner = f"Err[{names[field.payload]}]"
    if field.cardinality is Cardinality.MANY:
        return f"tuple[{inner}, ...]"
    if field.cardinality is Cardinality.OPTIONAL:
        return f"{inner} | None"
    return inner


def _class_block(entry: Terminal | Product, names: dict[str, str]) -> str:
    lines = ["@dataclass(frozen=True)", f"class {names[entry.name]}:"]
    lines.append("    ann: SourceSpan")
    if isinstance(entry, Terminal):
        lines.append("    text: str")
    else:
        for field in entry.fields:
            lines.append(f"    {field.attr}: {_payload_annotation(field, names)}")
        if entry.extra is not None:
            lines.append(f"    {entry.extra.attr}: {_payload_annotation(entry.extra, names)}")
    lines.append("    anon: tuple[Err, ...]")
    return "\n".join(lines)


def _slot_literal(field: FieldIR, schema: SchemaIR, indent: str) -> str:
    allowed, allow_token = schema.expansion(field.payload)
    parts = [
        repr(field.field_name),
        repr(field.attr),
        f"Cardinality.{field.cardinality.name}",
        _sorted_set_literal(allowed, indent),
    ]
    if allow_token:
        parts.append("allow_token=True")
    return f"SlotSpec({', '.join(parts)})"


def _spec_literal(entry: Terminal | Product, schema: SchemaIR, names: dict[str, str]) -> str:
    if isinstance(entry, Terminal):
        return f"    {entry.name!r}: TerminalSpec({names[entry.name]}),"
    lines = [f"    {entry.name!r}: ProductSpec("]
    lines.append(f"        {names[entry.name]},")
    if entry.fields:
        lines.append("        (")
        for field in entry.fields:
            lines.append(f"            {_slot_literal(field, schema, '            ')},")
        lines.append("        ),")
    else:
        lines.append("        (),")
    if entry.extra is not None:
        lines.append(f"        {_slot_literal(entry.extra, schema, '        ')},")
    else:
        lines.append("        None,")
    lines.append("    ),")
    return "\n".join(lines)


def emit_source(
    schema: SchemaIR, options: EmitterOptions = EmitterOptions()
) -> list[tuple[str, str]]:
    """Render the schema to (path, text) pairs; empty schema emits nothing."""
    if not schema.entries:
        return []
    names = _name_map(schema)
    has_token = TOKEN_TYPE in names
    concrete = [e for e in schema.entries if isinstance(e, (Terminal, Product))]
    declared = [e for e in concrete if e.name != TOKEN_TYPE]
    sums = [e for e in schema.entries if isinstance(e, Sum)]
    named_kinds = sorted(
        e.name
        for e in schema.entries
        if e.name != TOKEN_TYPE and not (isinstance(e, Sum) and e.synthesized)
    )

    grammar = options.grammar_name or options.module_name
    runtime_imports = ["Cardinality", "Err", "ProductSpec", "SlotSpec", "TerminalSpec", "decode_term"]
    header = [
        f'"""Typed syntax for the {grammar} grammar.',
        "",
        "Generated module: regenerate with the `generate` command after a",
        "grammar upgrade instead of editing by hand.",
        '"""',
        "from __future__ import annotations",
        "",
        "from dataclasses import dataclass",
        "",
        f"from {options.runtime_module} import (",
    ]
    for name in runtime_imports:
        header.append(f"    {name},")
    header.append(")")
    if has_token:
        header.append(f"from {options.runtime_module} import Token as _Token")
    header.append(f"from {options.syntax_module} import SourceSpan, Term")

    exported = sorted(names.values()) + ["decode"]
    all_block = ["__all__ = ["] + [f"    {n!r}," for n in sorted(exported)] + ["]"]

    blocks: list[str] = ["\n".join(header), "\n".join(all_block)]
    for entry in declared:
        blocks.append(_class_block(entry, names))
    alias_lines = []
    if has_token:
        alias_lines.append("Token = _Token")
    for entry in sums:
        rhs = " | ".join(names[a] for a in entry.alternatives)
        alias_lines.append(f"{names[entry.name]} = {rhs}")
    if alias_lines:
        blocks.append("\n".join(alias_lines))

    table_lines = ["NAMED_KINDS = frozenset({"]
    for kind in named_kinds:
        table_lines.append(f"    {kind!r},")
    table_lines.append("})")
    table_lines.append("")
    table_lines.append("NODE_SPECS: dict[str, TerminalSpec | ProductSpec] = {")
    for entry in concrete:
        if entry.name == TOKEN_TYPE:
            continue
        table_lines.append(_spec_literal(entry, schema, names))
    table_lines.append("}")
    blocks.append("\n".join(table_lines))

    blocks.append(
        "\n".join(
            [
                "def decode(term: Term) -> Err:",
                '    """Decode a Term parsed under this grammar into the typed classes."""',
                "    return decode_term(term, NODE_SPECS, NAMED_KINDS)",
            ]
        )
    )
    code = "\n\n\n".join(blocks) + "\n"

    manifest = {
        "module": options.module_name,
        "types": names,
        "fields": {
            e.name: {f.field_name: f.attr for f in e.fields}
            for e in schema.entries
            if isinstance(e, Product) and e.fields
        },
    }
    manifest_text = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return [
        (f"{options.module_name}.py", code),
        (f"{options.module_name}_names.json", manifest_text),
    ]
