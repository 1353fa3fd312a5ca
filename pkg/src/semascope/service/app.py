"""HTTP service: compute endpoints over JSON plus the persistent tag index.

Compute endpoints (/v1/parse, /v1/diff) are pure functions of the request
body; responses are canonical JSON so replays are byte-identical.  /v1/index
writes a revision's tags atomically; /v1/definitions and /v1/references
query them back.
"""
from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import PlainTextResponse, Response

from ..backend import BackendUnavailable
from ..diff import diff_terms, patch_is_identity
from ..diff.render import patch_to_obj
from ..languages import Registry, UnknownLanguage, load_registry
from ..parsing import parse_source
from ..portable import term_to_obj
from ..summary import entry_to_obj, table_of_contents
from ..tags import Role, extract_tags, tag_to_obj
from .store import TagStore

_MAX_REVISION_LENGTH = 200


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8134
    store_path: str = "semascope.db"
    max_body_bytes: int = 10 * 1024 * 1024
    request_timeout: float = 10.0
    registry_config: str | None = None

    def __post_init__(self) -> None:
        if self.max_body_bytes <= 0:
            raise ValueError(f"max_body_bytes must be positive, got {self.max_body_bytes}")
        if self.request_timeout <= 0:
            raise ValueError(f"request_timeout must be positive, got {self.request_timeout}")


class _BadRequest(Exception):
    pass


class _TooLarge(Exception):
    pass


def _json_response(payload: Any, status_code: int = 200) -> Response:
    # canonical encoding so identical requests replay byte-identically
    return Response(
        content=json.dumps(payload, ensure_ascii=False, separators=(",", ":")),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def _field(body: Any, name: str, kind: type) -> Any:
    if not isinstance(body, dict):
        raise _BadRequest("body must be a JSON object")
    value = body.get(name)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise _BadRequest(f"field {name!r} must be a {kind.__name__}")
    return value


def _language(registry: Registry, language_id: str):
    try:
        return registry.language(language_id)
    except UnknownLanguage as exc:
        raise _BadRequest(str(exc)) from exc


def _diff_options(language, raw: Any):
    overrides: dict[str, Any] = {}
    if raw is not None:
        if not isinstance(raw, dict):
            raise _BadRequest("options must be an object")
        if "similarity_threshold" in raw:
            value = raw["similarity_threshold"]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise _BadRequest("options.similarity_threshold must be a number")
            overrides["similarity_threshold"] = float(value)
        if "move_detection" in raw:
            value = raw["move_detection"]
            if not isinstance(value, bool):
                raise _BadRequest("options.move_detection must be a boolean")
            overrides["move_detection"] = value
    try:
        return language.diff_options(**overrides)
    except ValueError as exc:
        raise _BadRequest(str(exc)) from exc


def _valid_revision(revision: str) -> bool:
    if not revision or len(revision) > _MAX_REVISION_LENGTH:
        return False
    return all(c.isalnum() or c in "._/-" for c in revision)


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    registry = load_registry(config.registry_config)
    store = TagStore(config.store_path)
    app = FastAPI(title="semascope", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = config

    @app.middleware("http")
    async def guard(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and length.isdigit() and int(length) > config.max_body_bytes:
            return _error(413, "request body too large")
        try:
            return await asyncio.wait_for(call_next(request), timeout=config.request_timeout)
        except asyncio.TimeoutError:
            return _error(504, "request timed out")

    async def read_json(request: Request) -> Any:
        body = await request.body()
        if len(body) > config.max_body_bytes:
            raise _TooLarge()
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise _BadRequest(f"malformed JSON body: {exc.msg}") from exc

    @app.exception_handler(_BadRequest)
    async def bad_request(_request, exc: _BadRequest):
        return _error(400, str(exc))

    @app.exception_handler(_TooLarge)
    async def too_large(_request, _exc):
        return _error(413, "request body too large")

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/v1/parse")
    async def v1_parse(request: Request) -> Response:
        body = await read_json(request)
        language = _language(registry, _field(body, "language", str))
        source = _field(body, "source", str)
        try:
            term = parse_source(language, source.encode("utf-8", "surrogateescape"))
        except BackendUnavailable as exc:
            return _error(503, str(exc))
        return _json_response({"tree": term_to_obj(term)})

    @app.post("/v1/diff")
    async def v1_diff(request: Request) -> Response:
        body = await read_json(request)
        language = _language(registry, _field(body, "language", str))
        before = _field(body, "before", str)
        after = _field(body, "after", str)
        path = body.get("path", "") if isinstance(body, dict) else ""
        if not isinstance(path, str):
            raise _BadRequest("field 'path' must be a string")
        opts = _diff_options(language, body.get("options"))
        try:
            patch = diff_terms(
                parse_source(language, before.encode("utf-8", "surrogateescape")),
                parse_source(language, after.encode("utf-8", "surrogateescape")),
                opts,
            )
        except BackendUnavailable as exc:
            return _error(503, str(exc))
        toc = table_of_contents(patch, language.declaration_rules, path)
        return _json_response(
            {
                "patch": patch_to_obj(patch),
                "toc": [entry_to_obj(e) for e in toc],
                "identical": patch_is_identity(patch),
            }
        )

    @app.post("/v1/index")
    async def v1_index(request: Request) -> Response:
        body = await read_json(request)
        repo = _field(body, "repo", str)
        revision = _field(body, "revision", str)
        if not _valid_revision(revision):
            raise _BadRequest("revision must be a short content identifier")
        files = _field(body, "files", list)
        records: list[tuple[str, list[dict]]] = []
        failures: list[dict] = []
        for i, entry in enumerate(files):
            if not isinstance(entry, dict):
                raise _BadRequest(f"files[{i}] must be an object")
            path = entry.get("path")
            source = entry.get("source")
            if not isinstance(path, str) or not isinstance(source, str):
                raise _BadRequest(f"files[{i}] needs string path and source")
            try:
                language = registry.for_path(path)
                data = source.encode("utf-8", "surrogateescape")
                tags = extract_tags(parse_source(language, data), language.tag_rules, data)
            except (UnknownLanguage, BackendUnavailable) as exc:
                failures.append({"path": path, "error": str(exc)})
                continue
            records.append((path, [tag_to_obj(t) for t in tags]))
        indexed = store.replace_revision(repo, revision, records)
        return _json_response({"indexed": indexed, "failures": failures})

    def _lookup(repo: str, revision: str, name: str, role: Role) -> Response:
        return _json_response({"tags": store.lookup(repo, revision, name, role.value)})

    @app.get("/v1/definitions")
    async def v1_definitions(repo: str, revision: str, name: str) -> Response:
        return _lookup(repo, revision, name, Role.DEFINITION)

    @app.get("/v1/references")
    async def v1_references(repo: str, revision: str, name: str) -> Response:
        return _lookup(repo, revision, name, Role.REFERENCE)

    return app
