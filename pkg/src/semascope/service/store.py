"""Persistent tag store.

Embedded sqlite keyed by (repo, revision, path).  A revision's files are
written in one transaction, so a crash mid-index leaves the previous state
intact and a revision becomes visible only as a whole.  Connections are
per-thread; WAL mode lets readers proceed while a batch commits.
"""
from __future__ import annotations

import json
import sqlite3
import threading
import time
from pathlib import Path

_SCHEMA = """
CREATE TABLE IF NOT EXISTS tag_records (
    repo TEXT NOT NULL,
    revision TEXT NOT NULL,
    path TEXT NOT NULL,
    tags TEXT NOT NULL,
    indexed_at REAL NOT NULL,
    PRIMARY KEY (repo, revision, path)
)
"""


class TagStore:
    def __init__(self, path: str | Path) -> None:
        self._path = str(path)
        self._local = threading.local()
        self._all_lock = threading.Lock()
        self._all_conns: list[sqlite3.Connection] = []
        with self._conn() as conn:
            conn.executescript(_SCHEMA)

    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self._path, timeout=10.0)
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute("PRAGMA synchronous=NORMAL")
            conn.row_factory = sqlite3.Row
            self._local.conn = conn
            with self._all_lock:
                self._all_conns.append(conn)
        return conn

    def close(self) -> None:
        with self._all_lock:
            for conn in self._all_conns:
                try:
                    conn.close()
                except sqlite3.Error:
                    pass
            self._all_conns.clear()
        self._local = threading.local()

    def replace_revision(
        self, repo: str, revision: str, records: list[tuple[str, list[dict]]]
    ) -> int:
        """Store one revision's files atomically, replacing any prior index
        of the same (repo, revision).  Returns the record count."""
        now = time.time()
        rows = [
            (
                repo,
                revision,
                path,
                json.dumps(tags, ensure_ascii=False, separators=(",", ":")),
                now,
            )
            for path, tags in records
        ]
        conn = self._conn()
        with conn:
            conn.execute(
                "DELETE FROM tag_records WHERE repo = ? AND revision = ?",
                (repo, revision),
            )
            conn.executemany(
                "INSERT INTO tag_records (repo, revision, path, tags, indexed_at)"
                " VALUES (?, ?, ?, ?, ?)",
                rows,
            )
        return len(rows)

    def files(self, repo: str, revision: str) -> list[tuple[str, list[dict]]]:
        """All indexed (path, tags) of a revision in path order."""
        cur = self._conn().execute(
            "SELECT path, tags FROM tag_records WHERE repo = ? AND revision = ?"
            " ORDER BY path",
            (repo, revision),
        )
        return [(row["path"], json.loads(row["tags"])) for row in cur]

    def lookup(self, repo: str, revision: str, name: str, role: str) -> list[dict]:
        """Tags with this exact name and role, each carrying its path,
        ordered by (path, span).  Unknown keys yield an empty list."""
        out: list[dict] = []
        for path, tags in self.files(repo, revision):
            for tag in tags:
                if tag.get("name") == name and tag.get("role") == role:
                    out.append({**tag, "path": path})
        return out
