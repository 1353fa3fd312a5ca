"""ctypes binding to the parsing backend's C ABI.

The backend contract is the tree-sitter C ABI: grammar shared libraries
export a single `tree_sitter_<name>()` constructor returning a language
handle, and the runtime library walks trees via by-value node structs.
Nothing here depends on any Python binding package; the structs below mirror
api.h exactly.
"""
from __future__ import annotations

import ctypes
import os
from pathlib import Path

# Language versions this runtime build accepts (api.h constants).
LANGUAGE_VERSION = 14
MIN_COMPATIBLE_LANGUAGE_VERSION = 13


class BackendUnavailable(RuntimeError):
    """The parsing backend for a language could not be loaded."""


class TSPoint(ctypes.Structure):
    _fields_ = [("row", ctypes.c_uint32), ("column", ctypes.c_uint32)]


class TSNode(ctypes.Structure):
    _fields_ = [
        ("context", ctypes.c_uint32 * 4),
        ("id", ctypes.c_void_p),
        ("tree", ctypes.c_void_p),
    ]


_SIGNATURES = {
    "ts_parser_new": ([], ctypes.c_void_p),
    "ts_parser_delete": ([ctypes.c_void_p], None),
    "ts_parser_set_language": ([ctypes.c_void_p, ctypes.c_void_p], ctypes.c_bool),
    "ts_parser_parse_string": (
        [ctypes.c_void_p, ctypes.c_void_p, ctypes.c_char_p, ctypes.c_uint32],
        ctypes.c_void_p,
    ),
    "ts_tree_delete": ([ctypes.c_void_p], None),
    "ts_tree_root_node": ([ctypes.c_void_p], TSNode),
    "ts_language_version": ([ctypes.c_void_p], ctypes.c_uint32),
    "ts_node_type": ([TSNode], ctypes.c_char_p),
    "ts_node_start_byte": ([TSNode], ctypes.c_uint32),
    "ts_node_end_byte": ([TSNode], ctypes.c_uint32),
    "ts_node_start_point": ([TSNode], TSPoint),
    "ts_node_end_point": ([TSNode], TSPoint),
    "ts_node_child_count": ([TSNode], ctypes.c_uint32),
    "ts_node_child": ([TSNode, ctypes.c_uint32], TSNode),
    "ts_node_field_name_for_child": ([TSNode, ctypes.c_uint32], ctypes.c_char_p),
    "ts_node_is_named": ([TSNode], ctypes.c_bool),
    "ts_node_is_missing": ([TSNode], ctypes.c_bool),
    "ts_node_is_error": ([TSNode], ctypes.c_bool),
}


class Runtime:
    """The loaded runtime library with typed entry points."""

    def __init__(self, path: Path) -> None:
        try:
            self.lib = ctypes.CDLL(str(path))
        except OSError as exc:
            raise BackendUnavailable(f"cannot load runtime {path}: {exc}") from exc
        for name, (argtypes, restype) in _SIGNATURES.items():
            try:
                fn = getattr(self.lib, name)
            except AttributeError as exc:
                raise BackendUnavailable(f"{path} lacks symbol {name}") from exc
            fn.argtypes = argtypes
            fn.restype = restype
            setattr(self, name, fn)


class Language:
    """A grammar handle bound to its runtime."""

    def __init__(self, runtime: Runtime, library_path: Path, symbol: str) -> None:
        self.runtime = runtime
        try:
            self._lib = ctypes.CDLL(str(library_path))  # keep alive with the handle
        except OSError as exc:
            raise BackendUnavailable(f"cannot load grammar {library_path}: {exc}") from exc
        try:
            ctor = getattr(self._lib, symbol)
        except AttributeError as exc:
            raise BackendUnavailable(f"{library_path} lacks symbol {symbol}") from exc
        ctor.restype = ctypes.c_void_p
        ctor.argtypes = []
        self.handle = ctor()
        version = runtime.ts_language_version(self.handle)
        if not MIN_COMPATIBLE_LANGUAGE_VERSION <= version <= LANGUAGE_VERSION:
            raise BackendUnavailable(
                f"{library_path} speaks language version {version}, "
                f"supported range is {MIN_COMPATIBLE_LANGUAGE_VERSION}..{LANGUAGE_VERSION}"
            )


_runtime_cache: dict[Path, Runtime] = {}
_language_cache: dict[tuple[Path, str], Language] = {}


def default_library_dir() -> Path:
    """Where compiled backend libraries live.

    SEMASCOPE_GRAMMAR_DIR wins; otherwise the in-repo native/build directory
    next to this source tree."""
    env = os.environ.get("SEMASCOPE_GRAMMAR_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "native" / "build"


def load_runtime(directory: Path | None = None) -> Runtime:
    directory = directory or default_library_dir()
    path = directory / "libtree-sitter.so"
    runtime = _runtime_cache.get(path)
    if runtime is None:
        runtime = Runtime(path)
        _runtime_cache[path] = runtime
    return runtime


def load_language(library_path: Path, symbol: str, runtime: Runtime | None = None) -> Language:
    key = (library_path, symbol)
    language = _language_cache.get(key)
    if language is None:
        if runtime is None:
            # prefer a runtime sitting next to the grammar, else the default
            sibling = library_path.parent / "libtree-sitter.so"
            runtime = load_runtime(library_path.parent if sibling.exists() else None)
        language = Language(runtime, library_path, symbol)
        _language_cache[key] = language
    return language
