"""Command line behavior: formats, exit codes, config plumbing."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from semascope.cli import main


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def files(tmp_path: Path) -> Path:
    (tmp_path / "a.json").write_bytes(b'{"name": "alpha", "count": 1}\n')
    (tmp_path / "b.json").write_bytes(b'{"name": "alpha", "count": 2}\n')
    (tmp_path / "same.json").write_bytes(b'{"x": 1}\n')
    (tmp_path / "m1.py").write_bytes(b"def foo():\n    return 1\n")
    (tmp_path / "m2.py").write_bytes(b"def foo():\n    return 2\n")
    return tmp_path


def test_parse_json_format(files, capsys):
    code, out, err = run(capsys, "parse", str(files / "a.json"))
    assert code == 0 and err == ""
    obj = json.loads(out)
    assert obj["kind"] == "document"


def test_parse_sexp_format(files, capsys):
    code, out, _ = run(capsys, "parse", str(files / "a.json"), "--format", "sexp")
    assert code == 0
    assert out.startswith("(document")


def test_parse_error_nodes_still_exit_zero(files, capsys):
    bad = files / "broken.json"
    bad.write_bytes(b"{]")
    code, out, _ = run(capsys, "parse", str(bad), "--format", "sexp")
    assert code == 0
    assert "!error" in out or "!missing" in out


def test_parse_unknown_extension(files, capsys):
    target = files / "notes.txt"
    target.write_text("hello")
    code, _, err = run(capsys, "parse", str(target))
    assert code == 1
    assert "notes.txt" in err or "language" in err


def test_parse_language_override(files, capsys):
    target = files / "data.weird"
    target.write_bytes(b"[1, 2]")
    code, out, _ = run(capsys, "parse", str(target), "--language", "json")
    assert code == 0
    assert json.loads(out)["kind"] == "document"


def test_parse_missing_file(files, capsys):
    code, _, err = run(capsys, "parse", str(files / "ghost.json"))
    assert code == 1 and err


def test_diff_identical_exits_zero(files, capsys):
    code, out, _ = run(capsys, "diff", str(files / "same.json"), str(files / "same.json"))
    assert code == 0
    assert out == ""


def test_diff_formatting_only_exits_zero(files, capsys):
    pretty = files / "same_pretty.json"
    pretty.write_bytes(b'{\n  "x": 1\n}\n')
    code, out, _ = run(capsys, "diff", str(files / "same.json"), str(pretty))
    assert code == 0 and out == ""


def test_diff_text_format(files, capsys):
    code, out, _ = run(capsys, "diff", str(files / "a.json"), str(files / "b.json"))
    assert code == 1
    assert "replace" in out
    assert "number" in out


def test_diff_patch_format(files, capsys):
    code, out, _ = run(capsys, "diff", str(files / "a.json"), str(files / "b.json"),
                       "--format", "patch")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].startswith("--- a/")
    assert lines[1].startswith("+++ b/")
    assert any(l.startswith("@@") for l in lines)


def test_diff_json_format(files, capsys):
    code, out, _ = run(capsys, "diff", str(files / "a.json"), str(files / "b.json"),
                       "--format", "json")
    assert code == 1
    assert json.loads(out)["op"] == "copy"


def test_diff_sexp_format(files, capsys):
    code, out, _ = run(capsys, "diff", str(files / "a.json"), str(files / "b.json"),
                       "--format", "sexp")
    assert code == 1
    assert out.startswith("(copy")


def test_diff_mixed_languages_is_trouble(files, capsys):
    code, _, err = run(capsys, "diff", str(files / "a.json"), str(files / "m1.py"))
    assert code == 2 and err


def test_diff_missing_file_is_trouble(files, capsys):
    code, _, err = run(capsys, "diff", str(files / "a.json"), str(files / "nope.json"))
    assert code == 2 and err


def test_diff_trace_svg(files, tmp_path, capsys):
    out_svg = tmp_path / "trace.svg"
    code, _, _ = run(capsys, "diff", str(files / "m1.py"), str(files / "m2.py"),
                     "--trace-svg", str(out_svg))
    assert code == 1
    doc = out_svg.read_text(encoding="utf-8")
    assert "<svg" in doc and 'id="initial-snake"' in doc


def test_diff_directories(tmp_path, capsys):
    before = tmp_path / "before"
    after = tmp_path / "after"
    for d in (before, after):
        (d / "pkg").mkdir(parents=True)
    (before / "pkg" / "mod.py").write_bytes(b"def f():\n    return 1\n")
    (after / "pkg" / "mod.py").write_bytes(b"def f():\n    return 2\n")
    (before / "stable.json").write_bytes(b"[1]")
    (after / "stable.json").write_bytes(b"[1]")
    (before / "gone.json").write_bytes(b"{}")
    (after / "new.json").write_bytes(b"[]")
    code, out, err = run(capsys, "diff", str(before), str(after))
    assert code == 1
    assert "== pkg/mod.py" in out
    assert "stable.json" not in out
    assert "gone.json" in err and "new.json" in err


def test_diff_directories_trace_rejected(tmp_path, capsys):
    before = tmp_path / "b"
    after = tmp_path / "a"
    before.mkdir()
    after.mkdir()
    code, _, err = run(capsys, "diff", str(before), str(after),
                       "--trace-svg", str(tmp_path / "t.svg"))
    assert code == 2 and err


def test_toc_text_golden(files, capsys):
    code, out, _ = run(capsys, "toc", str(files / "m1.py"), str(files / "m2.py"))
    assert code == 1
    assert out == f"modified function foo ({files / 'm2.py'}:1)\n"


def test_toc_json(files, capsys):
    code, out, _ = run(capsys, "toc", str(files / "m1.py"), str(files / "m2.py"),
                       "--format", "json")
    assert code == 1
    entries = json.loads(out)
    assert entries[0]["name"] == "foo"
    assert entries[0]["change"] == "modified"


def test_toc_identical(files, capsys):
    code, out, _ = run(capsys, "toc", str(files / "m1.py"), str(files / "m1.py"))
    assert code == 0
    assert out == ""


def test_tags_text(files, capsys):
    target = files / "vars.py"
    target.write_bytes(b"x = 1\nprint(x)\n")
    code, out, _ = run(capsys, "tags", str(target))
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("x\t")


def test_tags_json(files, capsys):
    target = files / "vars.py"
    target.write_bytes(b"x = 1\nprint(x)\n")
    code, out, _ = run(capsys, "tags", str(target), "--format", "json")
    assert code == 0
    tags = json.loads(out)
    assert [t["name"] for t in tags] == ["x", "print", "x"]


def test_generate_json_grammar(tmp_path, capsys):
    node_types = Path(__file__).resolve().parents[1] / "native" / "grammars" / "json" / "node-types.json"
    out_dir = tmp_path / "gen"
    code, out, err = run(capsys, "generate", str(node_types), str(out_dir),
                         "--module-name", "jsyn", "--grammar", "json")
    assert code == 0
    assert (out_dir / "jsyn.py").exists()
    assert (out_dir / "jsyn_names.json").exists()
    assert "wrote" in err
    assert out == ""  # progress goes to stderr, stdout stays payload-only


def test_generate_is_deterministic(tmp_path, capsys):
    node_types = Path(__file__).resolve().parents[1] / "native" / "grammars" / "json" / "node-types.json"
    one = tmp_path / "one"
    two = tmp_path / "two"
    assert run(capsys, "generate", str(node_types), str(one))[0] == 0
    assert run(capsys, "generate", str(node_types), str(two))[0] == 0
    assert (one / "syntax.py").read_bytes() == (two / "syntax.py").read_bytes()


def test_generate_python_grammar_requires_lenient_flag(tmp_path, capsys):
    node_types = Path(__file__).resolve().parents[1] / "native" / "grammars" / "python" / "node-types.json"
    code, _, err = run(capsys, "generate", str(node_types), str(tmp_path / "g1"))
    assert code == 2
    assert "undeclared" in err or "as_pattern_target" in err
    code, _, _ = run(capsys, "generate", str(node_types), str(tmp_path / "g2"),
                     "--allow-undeclared")
    assert code == 0


def test_generate_rejects_bad_metadata(tmp_path, capsys):
    bad = tmp_path / "nt.json"
    bad.write_text("{}")
    code, _, err = run(capsys, "generate", str(bad), str(tmp_path / "out"))
    assert code == 2 and err


def test_config_flag_adds_language(tmp_path, files, capsys):
    cfg = tmp_path / "langs.ini"
    cfg.write_text("[json]\nextensions = .json .json5\n", encoding="utf-8")
    target = files / "alt.json5"
    target.write_bytes(b"[3]")
    code, out, _ = run(capsys, "--config", str(cfg), "parse", str(target))
    assert code == 0
    assert json.loads(out)["kind"] == "document"


def test_config_env_fallback(tmp_path, files, capsys, monkeypatch):
    cfg = tmp_path / "langs.ini"
    cfg.write_text("[json]\nextensions = .json .json5\n", encoding="utf-8")
    monkeypatch.setenv("SEMASCOPE_CONFIG", str(cfg))
    target = files / "env.json5"
    target.write_bytes(b"[4]")
    code, _, _ = run(capsys, "parse", str(target))
    assert code == 0


def test_config_errors_reported(tmp_path, files, capsys):
    cfg = tmp_path / "broken.ini"
    cfg.write_text("[toml]\nextensions = .toml\n", encoding="utf-8")
    code, _, err = run(capsys, "--config", str(cfg), "parse", str(files / "a.json"))
    assert code == 1 and "library" in err
