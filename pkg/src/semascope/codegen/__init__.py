"""Typed-syntax generation from grammar node-type metadata."""
from .emit import EmitterOptions, NameCollision, emit_source
from .node_types import ChildSlot, NodeTypeDescriptor, TypeRef, parse_node_types
from .runtime import (
    Cardinality,
    Err,
    ProductSpec,
    SlotSpec,
    TerminalSpec,
    Token,
    decode_term,
    typed_spans,
)
from .schema import (
    TOKEN_TYPE,
    FieldIR,
    Product,
    SchemaIR,
    Sum,
    Terminal,
    UnresolvedType,
    build_schema,
)

__all__ = [
    "Cardinality",
    "ChildSlot",
    "EmitterOptions",
    "Err",
    "FieldIR",
    "NameCollision",
    "NodeTypeDescriptor",
    "Product",
    "ProductSpec",
    "SchemaIR",
    "SlotSpec",
    "Sum",
    "TOKEN_TYPE",
    "Terminal",
    "TerminalSpec",
    "Token",
    "TypeRef",
    "UnresolvedType",
    "build_schema",
    "decode_term",
    "emit_source",
    "parse_node_types",
    "typed_spans",
]
