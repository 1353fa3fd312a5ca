"""HTTP service: endpoints, limits, store atomicity, response stability."""
from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from semascope.service import ServiceConfig, TagStore, create_app


@pytest.fixture
def client(tmp_path, native_libs):
    config = ServiceConfig(store_path=str(tmp_path / "tags.db"))
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.text == "ok"


def test_parse_endpoint(client):
    r = client.post("/v1/parse", json={"language": "json", "source": '{"a": 1}'})
    assert r.status_code == 200
    tree = r.json()["tree"]
    assert tree["kind"] == "document"
    assert tree["span"][0] == 0


def test_parse_unknown_language(client):
    r = client.post("/v1/parse", json={"language": "cobol", "source": "x"})
    assert r.status_code == 400
    assert "cobol" in r.json()["error"]


def test_parse_wrong_types(client):
    r = client.post("/v1/parse", json={"language": "json", "source": 5})
    assert r.status_code == 400
    r = client.post("/v1/parse", json={"source": "x"})
    assert r.status_code == 400


def test_malformed_body(client):
    r = client.post("/v1/parse", content=b"{nope",
                    headers={"content-type": "application/json"})
    assert r.status_code == 400


def test_body_size_limit(tmp_path):
    config = ServiceConfig(store_path=str(tmp_path / "t.db"), max_body_bytes=200)
    with TestClient(create_app(config)) as client:
        big = "x" * 500
        r = client.post("/v1/parse", json={"language": "json", "source": big})
        assert r.status_code == 413


def test_diff_endpoint(client):
    r = client.post("/v1/diff", json={
        "language": "python",
        "before": "def foo():\n    return 1\n",
        "after": "def foo():\n    return 2\n",
        "path": "m.py",
    })
    assert r.status_code == 200
    body = r.json()
    assert body["identical"] is False
    assert body["patch"]["op"] == "copy"
    assert [e["name"] for e in body["toc"]] == ["foo"]
    assert body["toc"][0]["file"] == "m.py"


def test_diff_identical(client):
    src = "x = 1\n"
    r = client.post("/v1/diff", json={"language": "python", "before": src, "after": src})
    assert r.status_code == 200
    assert r.json()["identical"] is True


def test_diff_options_validation(client):
    r = client.post("/v1/diff", json={
        "language": "json", "before": "1", "after": "2",
        "options": {"similarity_threshold": 3.0},
    })
    assert r.status_code == 400


def test_diff_options_accepted(client):
    r = client.post("/v1/diff", json={
        "language": "json", "before": "[1, 2]", "after": "[2, 1]",
        "options": {"similarity_threshold": 0.2, "move_detection": False},
    })
    assert r.status_code == 200


def test_response_bytes_are_canonical(client):
    payload = {"language": "json", "source": '{"k": [1, 2]}'}
    first = client.post("/v1/parse", json=payload)
    second = client.post("/v1/parse", json=payload)
    assert first.content == second.content
    assert b": " not in first.content.split(b'"text"')[0]


INDEX_BODY = {
    "repo": "demo",
    "revision": "rev1",
    "files": [
        {"path": "pkg/a.py", "source": "x = 1\nprint(x)\n"},
        {"path": "pkg/b.py", "source": "def helper():\n    return x\n"},
    ],
}


def test_index_and_lookup(client):
    r = client.post("/v1/index", json=INDEX_BODY)
    assert r.status_code == 200
    body = r.json()
    assert body["indexed"] == 2
    assert body["failures"] == []

    defs = client.get("/v1/definitions",
                      params={"repo": "demo", "revision": "rev1", "name": "x"})
    assert defs.status_code == 200
    tags = defs.json()["tags"]
    assert len(tags) == 1
    assert tags[0]["path"] == "pkg/a.py"
    assert tags[0]["role"] == "definition"

    refs = client.get("/v1/references",
                      params={"repo": "demo", "revision": "rev1", "name": "x"})
    paths = [t["path"] for t in refs.json()["tags"]]
    assert paths == ["pkg/a.py", "pkg/b.py"]


def test_index_skips_unknown_files(client):
    body = {
        "repo": "demo",
        "revision": "rev2",
        "files": [
            {"path": "ok.py", "source": "y = 2\n"},
            {"path": "README.txt", "source": "hello"},
        ],
    }
    r = client.post("/v1/index", json=body)
    assert r.status_code == 200
    out = r.json()
    assert out["indexed"] == 1
    assert out["failures"][0]["path"] == "README.txt"


def test_reindex_replaces_revision(client):
    client.post("/v1/index", json=INDEX_BODY)
    smaller = {
        "repo": "demo",
        "revision": "rev1",
        "files": [{"path": "pkg/a.py", "source": "z = 3\n"}],
    }
    r = client.post("/v1/index", json=smaller)
    assert r.json()["indexed"] == 1
    old = client.get("/v1/definitions",
                     params={"repo": "demo", "revision": "rev1", "name": "x"})
    assert old.json()["tags"] == []
    new = client.get("/v1/definitions",
                     params={"repo": "demo", "revision": "rev1", "name": "z"})
    assert len(new.json()["tags"]) == 1


def test_revisions_are_isolated(client):
    client.post("/v1/index", json=INDEX_BODY)
    other = dict(INDEX_BODY, revision="rev9",
                 files=[{"path": "only.py", "source": "q = 4\n"}])
    client.post("/v1/index", json=other)
    r1 = client.get("/v1/definitions",
                    params={"repo": "demo", "revision": "rev1", "name": "x"})
    r9 = client.get("/v1/definitions",
                    params={"repo": "demo", "revision": "rev9", "name": "q"})
    assert len(r1.json()["tags"]) == 1
    assert len(r9.json()["tags"]) == 1


def test_bad_revision_rejected(client):
    bad = dict(INDEX_BODY, revision="rev one with spaces")
    r = client.post("/v1/index", json=bad)
    assert r.status_code == 400


def test_unknown_repo_is_empty_not_error(client):
    r = client.get("/v1/definitions",
                   params={"repo": "nowhere", "revision": "r", "name": "x"})
    assert r.status_code == 200
    assert r.json()["tags"] == []


def test_store_direct_roundtrip(tmp_path):
    store = TagStore(str(tmp_path / "direct.db"))
    try:
        n = store.replace_revision("r", "v1", [
            ("a.py", [{"name": "x", "role": "definition", "category": "variable",
                       "span": [0, 1, 0, 0, 0, 1], "line": "x = 1", "scope_path": []}]),
        ])
        assert n == 1
        assert [path for path, _ in store.files("r", "v1")] == ["a.py"]
        found = store.lookup("r", "v1", "x", "definition")
        assert found[0]["path"] == "a.py"
    finally:
        store.close()


def test_store_concurrent_readers(tmp_path):
    store = TagStore(str(tmp_path / "conc.db"))
    try:
        store.replace_revision("r", "v", [
            ("f.py", [{"name": "n", "role": "definition", "category": "variable",
                       "span": [0, 1, 0, 0, 0, 1], "line": "n = 1", "scope_path": []}]),
        ])
        errors: list[Exception] = []

        def reader():
            try:
                for _ in range(50):
                    assert store.lookup("r", "v", "n", "definition")
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=reader) for _ in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
    finally:
        store.close()


def test_config_validation():
    with pytest.raises(ValueError):
        ServiceConfig(max_body_bytes=0)
    with pytest.raises(ValueError):
        ServiceConfig(request_timeout=-1)
