"""Language registry: built-ins, path dispatch, INI configuration."""
from __future__ import annotations

import pytest

from semascope.languages import (
    GrammarBackend,
    LanguageDescriptor,
    Registry,
    UnknownLanguage,
    builtin_registry,
    load_registry,
)


def test_builtins_present(registry):
    ids = {d.language_id for d in registry.languages}
    assert {"json", "python"} <= ids


def test_language_lookup(registry):
    assert registry.language("json").language_id == "json"
    with pytest.raises(UnknownLanguage):
        registry.language("cobol")


def test_unknown_language_message_is_clean(registry):
    # KeyError subclasses normally repr their args; str() must stay readable
    try:
        registry.language("cobol")
    except UnknownLanguage as exc:
        assert "cobol" in str(exc)
        assert not str(exc).startswith('"')


def test_for_path_dispatch(registry):
    assert registry.for_path("settings.json").language_id == "json"
    assert registry.for_path("/deep/dir/mod.py").language_id == "python"
    assert registry.for_path("stub.pyi").language_id == "python"
    with pytest.raises(UnknownLanguage):
        registry.for_path("notes.txt")


def test_ambiguous_extension_rejected(registry):
    clone = Registry()
    for d in registry.languages:
        clone.register(d)
    dup = LanguageDescriptor(
        language_id="json5",
        file_extensions=(".json",),
        backend=GrammarBackend("json.so", "tree_sitter_json"),
    )
    clone.register(dup)
    with pytest.raises(UnknownLanguage) as exc:
        clone.for_path("x.json")
    assert "ambiguous" in str(exc.value)


def test_reregistering_replaces(registry):
    clone = Registry()
    d = registry.language("json")
    clone.register(d)
    from dataclasses import replace

    clone.register(replace(d, file_extensions=(".jsonc",)))
    assert clone.for_path("a.jsonc").language_id == "json"
    with pytest.raises(UnknownLanguage):
        clone.for_path("a.json")


def test_diff_options_pull_language_tuning(registry):
    python = registry.language("python")
    opts = python.diff_options()
    assert opts.identity_fields.get("function_definition") == "name"
    tweaked = python.diff_options(similarity_threshold=0.9)
    assert tweaked.similarity_threshold == 0.9
    assert tweaked.identity_fields == opts.identity_fields

    json_opts = registry.language("json").diff_options()
    assert json_opts.keyed_kinds.get("object") == "key"


def test_load_registry_without_config_matches_builtin():
    a = load_registry()
    b = builtin_registry()
    assert {d.language_id for d in a.languages} == {d.language_id for d in b.languages}


def test_load_registry_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_registry(tmp_path / "absent.ini")


def test_config_overrides_existing_language(tmp_path):
    cfg = tmp_path / "languages.ini"
    cfg.write_text(
        "[json]\n"
        "extensions = .json .json5\n"
        "identity_fields = pair:key\n",
        encoding="utf-8",
    )
    reg = load_registry(cfg)
    assert reg.for_path("a.json5").language_id == "json"
    assert reg.language("json").identity_fields == {"pair": "key"}
    # untouched languages survive
    assert reg.language("python").language_id == "python"


def test_config_new_language_needs_library(tmp_path):
    cfg = tmp_path / "languages.ini"
    cfg.write_text("[toml]\nextensions = .toml\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_registry(cfg)


def test_config_new_language_registered(tmp_path):
    cfg = tmp_path / "languages.ini"
    cfg.write_text(
        "[toml]\n"
        "library = toml.so\n"
        "extensions = .toml\n"
        "keyed_kinds = table:name document:name\n",
        encoding="utf-8",
    )
    reg = load_registry(cfg)
    toml = reg.for_path("conf.toml")
    assert toml.backend.library == "toml.so"
    assert toml.backend.symbol == "tree_sitter_toml"  # defaulted from the id
    assert toml.keyed_kinds == {"table": "name", "document": "name"}


def test_config_rejects_malformed_mapping(tmp_path):
    cfg = tmp_path / "languages.ini"
    cfg.write_text("[json]\nidentity_fields = nofield\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_registry(cfg)


def test_backend_resolve_path_env_override(tmp_path, monkeypatch):
    lib = tmp_path / "fake.so"
    lib.write_bytes(b"")
    monkeypatch.setenv("SEMASCOPE_GRAMMAR_DIR", str(tmp_path))
    backend = GrammarBackend("fake.so", "tree_sitter_fake")
    assert backend.resolve_path() == lib
