"""Typed syntax generation: grammar metadata parsing, schema construction,
source emission, and the decoding runtime."""
from __future__ import annotations

import ast
import json
from pathlib import Path

import pytest

from semascope.codegen import (
    Cardinality,
    ChildSlot,
    EmitterOptions,
    NameCollision,
    NodeTypeDescriptor,
    Product,
    SchemaIR,
    Sum,
    Terminal,
    TypeRef,
    UnresolvedType,
    build_schema,
    emit_source,
    parse_node_types,
)
from semascope.codegen.schema import TOKEN_TYPE
from semascope.portable import FormatError

REPO = Path(__file__).resolve().parents[1]
JSON_NODE_TYPES = REPO / "native" / "grammars" / "json" / "node-types.json"
PYTHON_NODE_TYPES = REPO / "native" / "grammars" / "python" / "node-types.json"
COMMITTED = REPO / "src" / "semascope" / "generated"


# --- metadata parsing -------------------------------------------------------


def test_parse_real_grammar_documents():
    descs = parse_node_types(JSON_NODE_TYPES.read_text())
    names = {d.type_name for d in descs if d.named}
    assert {"document", "object", "pair", "array", "string", "number"} <= names
    pair = next(d for d in descs if d.type_name == "pair")
    fields = dict(pair.fields)
    assert {"key", "value"} <= set(fields)
    key_types = {ref.type_name for ref in fields["key"].types}
    assert key_types == {"number", "string"}


def test_parse_supertype_entries():
    descs = parse_node_types(JSON_NODE_TYPES.read_text())
    value = next(d for d in descs if d.type_name == "_value")
    assert value.is_supertype
    assert len(value.subtypes) == 7


def test_parse_rejects_non_list():
    with pytest.raises(FormatError):
        parse_node_types("{}")


def test_parse_rejects_bad_entries():
    with pytest.raises(FormatError) as exc:
        parse_node_types('[{"named": true}]')
    assert "$[0]" in str(exc.value)
    with pytest.raises(FormatError):
        parse_node_types('[{"type": "x", "named": "yes"}]')
    with pytest.raises(FormatError):
        parse_node_types(
            '[{"type": "x", "named": true,'
            ' "fields": {"f": {"multiple": false, "required": true, "types": []}}}]'
        )


def test_parse_rejects_malformed_json():
    with pytest.raises(FormatError):
        parse_node_types("[")


def test_parse_ignores_unknown_keys():
    doc = '[{"type": "x", "named": true, "extra_metadata": 1}]'
    (desc,) = parse_node_types(doc)
    assert desc.type_name == "x" and desc.is_terminal


# --- schema construction ----------------------------------------------------


def desc(name, *, named=True, subtypes=None, fields=(), children=None):
    return NodeTypeDescriptor(name, named, subtypes, tuple(fields), children)


def slot(types, *, multiple=False, required=True):
    return ChildSlot(multiple, required, tuple(TypeRef(t, True) for t in types))


def test_schema_from_json_grammar():
    schema = build_schema(parse_node_types(JSON_NODE_TYPES.read_text()))
    entries = schema.entry_map()
    value = entries["_value"]
    assert isinstance(value, Sum)
    assert len(value.alternatives) == 7

    pair = entries["pair"]
    assert isinstance(pair, Product)
    by_name = {f.field_name: f for f in pair.fields if f.field_name}
    assert by_name["key"].cardinality is Cardinality.ONE
    key_kinds, allow_token = schema.expansion(by_name["key"].payload)
    assert key_kinds == frozenset({"number", "string"})
    assert not allow_token

    array = entries["array"]
    assert array.extra is not None  # the positional children slot
    assert array.extra.cardinality is Cardinality.MANY
    kinds, _ = schema.expansion(array.extra.payload)
    assert kinds == frozenset(
        {"object", "array", "number", "string", "true", "false", "null"}
    )


def test_supertype_expansion_flattens_nesting():
    descs = [
        desc("a", subtypes=(TypeRef("b", True), TypeRef("leaf1", True))),
        desc("b", subtypes=(TypeRef("leaf2", True),)),
        desc("leaf1"),
        desc("leaf2"),
        desc("root", fields=[("x", slot(["a"]))]),
    ]
    schema = build_schema(descs)
    kinds, _ = schema.expansion("a")
    assert kinds == frozenset({"leaf1", "leaf2"})


def test_cardinality_mapping():
    descs = [
        desc("leaf"),
        desc(
            "node",
            fields=[
                ("one", slot(["leaf"])),
                ("opt", ChildSlot(False, False, (TypeRef("leaf", True),))),
                ("many", ChildSlot(True, False, (TypeRef("leaf", True),))),
            ],
        ),
    ]
    schema = build_schema(descs)
    node = schema.entry_map()["node"]
    cards = {f.field_name: f.cardinality for f in node.fields}
    assert cards == {
        "one": Cardinality.ONE,
        "opt": Cardinality.OPTIONAL,
        "many": Cardinality.MANY,
    }


def test_multi_type_slot_synthesizes_local_sum():
    descs = [
        desc("x"),
        desc("y"),
        desc("holder", fields=[("item", slot(["x", "y"]))]),
    ]
    schema = build_schema(descs)
    holder = schema.entry_map()["holder"]
    (field,) = holder.fields
    payload = field.payload
    entry = schema.entry_map()[payload]
    assert isinstance(entry, Sum) and entry.synthesized
    kinds, _ = schema.expansion(payload)
    assert kinds == frozenset({"x", "y"})


def test_anonymous_only_slot_becomes_token():
    descs = [
        desc("op", fields=[("operator", ChildSlot(False, True,
                                                  (TypeRef("+", False), TypeRef("-", False))))]),
    ]
    schema = build_schema(descs)
    op = schema.entry_map()["op"]
    (field,) = op.fields
    assert field.payload == TOKEN_TYPE
    assert TOKEN_TYPE in schema.entry_map()


def test_mixed_slot_allows_token_alternative():
    descs = [
        desc("name"),
        desc("key", fields=[("id", ChildSlot(False, True,
                                             (TypeRef("name", True), TypeRef("quoted", False))))]),
    ]
    schema = build_schema(descs)
    key = schema.entry_map()["key"]
    (field,) = key.fields
    _, allow_token = schema.expansion(field.payload)
    assert allow_token


def test_unresolved_reference_raises():
    descs = [desc("root", fields=[("x", slot(["phantom"]))])]
    with pytest.raises(UnresolvedType) as exc:
        build_schema(descs)
    assert "phantom" in str(exc.value)


def test_unresolved_reference_synthesized_on_request():
    descs = [desc("root", fields=[("x", slot(["phantom"]))])]
    schema = build_schema(descs, synthesize_missing=True)
    assert isinstance(schema.entry_map()["phantom"], Terminal)


def test_python_grammar_needs_lenient_mode():
    descs = parse_node_types(PYTHON_NODE_TYPES.read_text())
    with pytest.raises(UnresolvedType):
        build_schema(descs)
    schema = build_schema(descs, synthesize_missing=True)
    assert "function_definition" in schema.entry_map()


def test_duplicate_descriptor_rejected():
    with pytest.raises(ValueError):
        build_schema([desc("x"), desc("x")])


# --- emission ---------------------------------------------------------------


def emit_json_module():
    schema = build_schema(parse_node_types(JSON_NODE_TYPES.read_text()))
    return emit_source(
        schema, EmitterOptions(module_name="json_syntax", grammar_name="json")
    )


def test_emit_returns_module_and_manifest():
    files = dict(emit_json_module())
    assert set(files) == {"json_syntax.py", "json_syntax_names.json"}
    manifest = json.loads(files["json_syntax_names.json"])
    assert manifest["module"] == "json_syntax"
    assert manifest["types"]["pair"] == "Pair"
    assert manifest["types"]["true"] == "True_"


def test_emit_is_deterministic():
    assert emit_json_module() == emit_json_module()


def test_emitted_module_parses_and_declares_expected_names():
    files = dict(emit_json_module())
    tree = ast.parse(files["json_syntax.py"])
    classes = {n.name for n in ast.walk(tree) if isinstance(n, ast.ClassDef)}
    assert {"Document", "Object", "Pair", "Array", "String", "Number", "True_",
            "False_", "Null"} <= classes
    assigns = set()
    for n in ast.walk(tree):
        if isinstance(n, ast.Assign):
            assigns.update(t.id for t in n.targets if isinstance(t, ast.Name))
        elif isinstance(n, ast.AnnAssign) and isinstance(n.target, ast.Name):
            assigns.add(n.target.id)
    assert {"Value", "PairKey", "NAMED_KINDS", "NODE_SPECS", "__all__"} <= assigns


def test_committed_module_is_fresh():
    """The checked-in generated module must equal what the pipeline
    produces from the grammar metadata it ships."""
    for name, text in emit_json_module():
        assert (COMMITTED / name).read_text(encoding="utf-8") == text


def test_empty_schema_emits_nothing():
    assert emit_source(SchemaIR(()), EmitterOptions(module_name="m")) == []


def test_runtime_name_collision_rejected():
    # "err" would CamelCase onto the runtime's Err wrapper
    schema = build_schema([desc("err")])
    with pytest.raises(NameCollision):
        emit_source(schema, EmitterOptions(module_name="m"))


def test_class_name_collision_rejected():
    schema = build_schema([desc("my_node"), desc("myNode")])
    with pytest.raises(NameCollision):
        emit_source(schema, EmitterOptions(module_name="m"))


def test_keyword_kinds_get_trailing_underscore():
    schema = build_schema([desc("true"), desc("none")])
    files = dict(emit_source(schema, EmitterOptions(module_name="m")))
    manifest = json.loads(files["m_names.json"])
    assert manifest["types"]["true"] == "True_"
    assert manifest["types"]["none"] == "None_"
