"""Language registry: which grammars exist, how files map to them, and the
per-language rule sets that drive diffing, summaries, and tags.

Built-in descriptors cover JSON and Python (vendored grammars).  A config
file (INI; section per language id) can add languages or override fields:

    [toml]
    extensions = .toml
    library = /opt/grammars/toml.so
    symbol = tree_sitter_toml
    identity_fields = table:name
    keyed_kinds = table:name
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .backend import default_library_dir
from .diff.engine import DiffOptions
from .summary import DeclarationRule
from .tags import Role, TagRule


class UnknownLanguage(KeyError):
    """No registered language matches the requested id or file extension."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class GrammarBackend:
    """Shared library + constructor symbol implementing the C ABI contract."""

    library: str  # filename resolved against the library dir, or absolute path
    symbol: str

    def resolve_path(self) -> Path:
        path = Path(self.library)
        if path.is_absolute():
            return path
        return default_library_dir() / path


@dataclass(frozen=True)
class LanguageDescriptor:
    language_id: str
    file_extensions: tuple[str, ...]
    backend: GrammarBackend
    significant_kinds: frozenset[str] = frozenset()
    declaration_rules: tuple[DeclarationRule, ...] = ()
    tag_rules: tuple[TagRule, ...] = ()
    identity_fields: dict[str, str] = field(default_factory=dict)
    keyed_kinds: dict[str, str] = field(default_factory=dict)

    def diff_options(self, **overrides) -> DiffOptions:
        """Language-tuned DiffOptions; keyword overrides win."""
        values = {
            "identity_fields": dict(self.identity_fields),
            "keyed_kinds": dict(self.keyed_kinds),
        }
        values.update(overrides)
        return DiffOptions(**values)


class Registry:
    def __init__(self) -> None:
        self._by_id: dict[str, LanguageDescriptor] = {}

    def register(self, descriptor: LanguageDescriptor) -> None:
        self._by_id[descriptor.language_id] = descriptor

    @property
    def languages(self) -> list[LanguageDescriptor]:
        return list(self._by_id.values())

    def language(self, language_id: str) -> LanguageDescriptor:
        try:
            return self._by_id[language_id]
        except KeyError:
            raise UnknownLanguage(f"unknown language {language_id!r}") from None

    def for_path(self, path: str | Path) -> LanguageDescriptor:
        suffix = Path(path).suffix.lower()
        matches = [d for d in self._by_id.values() if suffix in d.file_extensions]
        if not matches:
            raise UnknownLanguage(f"no language registered for extension {suffix!r}")
        if len(matches) > 1:
            ids = ", ".join(sorted(d.language_id for d in matches))
            raise UnknownLanguage(f"extension {suffix!r} is ambiguous between {ids}")
        return matches[0]


PYTHON_TAG_RULES: tuple[TagRule, ...] = (
    TagRule(
        "function_definition",
        Role.DEFINITION,
        "function",
        name_path=("name",),
        scope_introducing=True,
        binds_locals="parameters",
    ),
    TagRule(
        "class_definition",
        Role.DEFINITION,
        "class",
        name_path=("name",),
        scope_introducing=True,
    ),
    TagRule("assignment", Role.DEFINITION, "variable", name_path=("left",), binds_locals="left"),
    TagRule("for_statement", Role.DEFINITION, "variable", name_path=None, binds_locals="left"),
    TagRule("call", Role.REFERENCE, "call", name_path=("function",)),
    TagRule("identifier", Role.REFERENCE, "variable", name_path=()),
)

PYTHON_DECLARATION_RULES: tuple[DeclarationRule, ...] = (
    DeclarationRule("function_definition", "function", ("name",)),
    DeclarationRule("class_definition", "class", ("name",)),
)

JSON_TAG_RULES: tuple[TagRule, ...] = (
    TagRule(
        "pair",
        Role.DEFINITION,
        "key",
        name_path=("key",),
        name_descend=True,
        scope_introducing=True,
    ),
)


def builtin_registry() -> Registry:
    registry = Registry()
    registry.register(
        LanguageDescriptor(
            language_id="json",
            file_extensions=(".json",),
            backend=GrammarBackend("json.so", "tree_sitter_json"),
            significant_kinds=frozenset(
                {"document", "object", "array", "pair", "string", "number"}
            ),
            declaration_rules=(),
            tag_rules=JSON_TAG_RULES,
            keyed_kinds={"object": "key"},
        )
    )
    registry.register(
        LanguageDescriptor(
            language_id="python",
            file_extensions=(".py", ".pyi"),
            backend=GrammarBackend("python.so", "tree_sitter_python"),
            significant_kinds=frozenset(
                {
                    "module",
                    "function_definition",
                    "class_definition",
                    "assignment",
                    "call",
                    "identifier",
                }
            ),
            declaration_rules=PYTHON_DECLARATION_RULES,
            tag_rules=PYTHON_TAG_RULES,
            identity_fields={
                "function_definition": "name",
                "class_definition": "name",
            },
        )
    )
    return registry


def _parse_mapping(raw: str) -> dict[str, str]:
    """"kind:field kind:field" pairs."""
    out: dict[str, str] = {}
    for item in raw.split():
        kind, _, fld = item.partition(":")
        if not kind or not fld:
            raise ValueError(f"expected kind:field, got {item!r}")
        out[kind] = fld
    return out


def load_registry(config_path: str | Path | None = None) -> Registry:
    """Built-ins plus (optionally) languages from an INI config file."""
    registry = builtin_registry()
    if config_path is None:
        return registry
    parser = configparser.ConfigParser()
    read = parser.read(config_path)
    if not read:
        raise FileNotFoundError(f"config file not found: {config_path}")
    for section in parser.sections():
        options = parser[section]
        try:
            existing = registry.language(section)
        except UnknownLanguage:
            existing = None
        if existing is None:
            if "library" not in options:
                raise ValueError(f"[{section}] must set library for a new language")
            descriptor = LanguageDescriptor(
                language_id=section,
                file_extensions=(),
                backend=GrammarBackend(
                    options["library"], options.get("symbol", f"tree_sitter_{section}")
                ),
            )
        else:
            descriptor = existing
            if "library" in options or "symbol" in options:
                descriptor = replace(
                    descriptor,
                    backend=GrammarBackend(
                        options.get("library", descriptor.backend.library),
                        options.get("symbol", descriptor.backend.symbol),
                    ),
                )
        if "extensions" in options:
            exts = tuple(
                e if e.startswith(".") else f".{e}" for e in options["extensions"].split()
            )
            descriptor = replace(descriptor, file_extensions=exts)
        if "significant_kinds" in options:
            descriptor = replace(
                descriptor, significant_kinds=frozenset(options["significant_kinds"].split())
            )
        if "identity_fields" in options:
            descriptor = replace(
                descriptor, identity_fields=_parse_mapping(options["identity_fields"])
            )
        if "keyed_kinds" in options:
            descriptor = replace(descriptor, keyed_kinds=_parse_mapping(options["keyed_kinds"]))
        registry.register(descriptor)
    return registry
