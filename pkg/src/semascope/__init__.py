"""semascope: syntax-aware diffing, change summaries, and navigation tags.

The core abstraction is Term, a language-agnostic syntax tree produced by
error-tolerant parsing backends.  Everything else is generic over it:
structural diffing with move detection, unified-patch and JSON rendering,
change tables of contents, ctags-style symbol extraction, typed-AST
generation from grammar metadata, and a CLI plus HTTP service on top.
"""
from .languages import LanguageDescriptor, Registry, UnknownLanguage, builtin_registry, load_registry
from .parsing import BackendUnavailable, parse_source, parse_text
from .portable import FormatError, decode_portable, encode_portable, term_sexp
from .syntax import (
    Annotation,
    ErrorStatus,
    NodeData,
    Side,
    SourceSpan,
    Term,
    child_terms,
    count_terms,
    fold,
    iter_terms,
    para,
    term_text,
    unfold,
    validate_term,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "BackendUnavailable",
    "ErrorStatus",
    "FormatError",
    "LanguageDescriptor",
    "NodeData",
    "Registry",
    "Side",
    "SourceSpan",
    "Term",
    "UnknownLanguage",
    "builtin_registry",
    "child_terms",
    "count_terms",
    "decode_portable",
    "encode_portable",
    "fold",
    "iter_terms",
    "load_registry",
    "para",
    "parse_source",
    "parse_text",
    "term_sexp",
    "term_text",
    "unfold",
    "validate_term",
    "__version__",
]
