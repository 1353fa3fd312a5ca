#!/usr/bin/env python3
"""Compile the vendored parsing runtime and grammars into shared libraries.

Outputs land in native/build/:

    libtree-sitter.so   the parsing runtime
    json.so             JSON grammar (exports tree_sitter_json)
    python.so           Python grammar (exports tree_sitter_python)

Run directly (`python native/build.py`) or let the test suite invoke it on
demand.  Only a C compiler is required; cc is resolved from CC or PATH.
"""
from __future__ import annotations

import os
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
BUILD = HERE / "build"

RUNTIME_SRC = HERE / "tree-sitter" / "src" / "lib.c"
RUNTIME_INCLUDES = [HERE / "tree-sitter" / "src", HERE / "tree-sitter" / "include"]

GRAMMARS = {
    "json": [HERE / "grammars" / "json" / "parser.c"],
    "python": [
        HERE / "grammars" / "python" / "parser.c",
        HERE / "grammars" / "python" / "scanner.c",
    ],
}


def _compiler() -> str:
    cc = os.environ.get("CC") or shutil.which("cc") or shutil.which("gcc") or shutil.which("clang")
    if not cc:
        raise SystemExit("no C compiler found; set CC or install gcc/clang")
    return cc


def _compile(cc: str, sources: list[Path], includes: list[Path], out: Path) -> None:
    cmd = [cc, "-shared", "-fPIC", "-O2"]
    for inc in includes:
        cmd += ["-I", str(inc)]
    cmd += [str(s) for s in sources] + ["-o", str(out)]
    subprocess.run(cmd, check=True)


def _stale(out: Path, sources: list[Path]) -> bool:
    if not out.exists():
        return True
    mtime = out.stat().st_mtime
    return any(s.stat().st_mtime > mtime for s in sources)


def build(force: bool = False) -> Path:
    """Build any missing or out-of-date libraries; return the output directory."""
    BUILD.mkdir(exist_ok=True)
    cc = _compiler()
    runtime_out = BUILD / "libtree-sitter.so"
    if force or _stale(runtime_out, [RUNTIME_SRC]):
        _compile(cc, [RUNTIME_SRC], RUNTIME_INCLUDES, runtime_out)
    for name, sources in GRAMMARS.items():
        out = BUILD / f"{name}.so"
        if force or _stale(out, sources):
            _compile(cc, sources, [sources[0].parent], out)
    return BUILD


if __name__ == "__main__":
    force = "--force" in sys.argv[1:]
    out = build(force=force)
    print(f"libraries ready in {out}")
