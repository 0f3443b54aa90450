"""SQLite-backed storage of submitted models.

Every write is kept as a row of ``model_versions`` so older revisions remain
available; ``models`` holds the current revision of each id.
"""

from __future__ import annotations

import sqlite3
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

SCHEMA = """
CREATE TABLE IF NOT EXISTS models (
    model_id   INTEGER PRIMARY KEY AUTOINCREMENT,
    username   TEXT NOT NULL,
    source     TEXT NOT NULL,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL,
    version    INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS models_by_user ON models (username, updated_at, model_id);
CREATE TABLE IF NOT EXISTS model_versions (
    model_id   INTEGER NOT NULL REFERENCES models (model_id) ON DELETE CASCADE,
    version    INTEGER NOT NULL,
    source     TEXT NOT NULL,
    written_at TEXT NOT NULL,
    PRIMARY KEY (model_id, version)
);
"""


def _utc_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class StoredModel:
    model_id: int
    username: str
    source: str
    created_at: str
    updated_at: str
    version: int

    def to_dict(self) -> dict:
        return asdict(self)


class ModelStore:
    """Thread-safe store; writes are serialized through one lock.

    *clock* returns ISO-8601 timestamps and is injectable so tests can pin
    the ordering of writes.
    """

    def __init__(self, path: str | Path = ":memory:", clock: Callable[[], str] = _utc_iso) -> None:
        self.path = str(path)
        self.clock = clock
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False, isolation_level=None)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._conn.executescript(SCHEMA)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def _row(self, row: sqlite3.Row | None) -> StoredModel | None:
        return None if row is None else StoredModel(**{k: row[k] for k in row.keys()})

    def create(self, username: str, source: str) -> StoredModel:
        with self._lock:
            now = self.clock()
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                cur = self._conn.execute(
                    "INSERT INTO models (username, source, created_at, updated_at, version) VALUES (?, ?, ?, ?, 1)",
                    (username, source, now, now),
                )
                model_id = cur.lastrowid
                self._conn.execute(
                    "INSERT INTO model_versions (model_id, version, source, written_at) VALUES (?, 1, ?, ?)",
                    (model_id, source, now),
                )
                self._conn.execute("COMMIT")
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            return self.get(model_id)

    def get(self, model_id: int) -> StoredModel | None:
        with self._lock:
            row = self._conn.execute("SELECT * FROM models WHERE model_id = ?", (model_id,)).fetchone()
        return self._row(row)

    def update(self, model_id: int, source: str) -> StoredModel | None:
        """Replace the source and bump the version; None when the id is unknown."""
        with self._lock:
            now = self.clock()
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                row = self._conn.execute("SELECT version FROM models WHERE model_id = ?", (model_id,)).fetchone()
                if row is None:
                    self._conn.execute("ROLLBACK")
                    return None
                version = row["version"] + 1
                self._conn.execute(
                    "UPDATE models SET source = ?, updated_at = ?, version = ? WHERE model_id = ?",
                    (source, now, version, model_id),
                )
                self._conn.execute(
                    "INSERT INTO model_versions (model_id, version, source, written_at) VALUES (?, ?, ?, ?)",
                    (model_id, version, source, now),
                )
                self._conn.execute("COMMIT")
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            return self.get(model_id)

    def delete(self, model_id: int) -> bool:
        with self._lock:
            cur = self._conn.execute("DELETE FROM models WHERE model_id = ?", (model_id,))
            return cur.rowcount > 0

    def versions(self, model_id: int) -> list[tuple[int, str]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT version, source FROM model_versions WHERE model_id = ? ORDER BY version", (model_id,)
            ).fetchall()
        return [(r["version"], r["source"]) for r in rows]

    def latest_for(self, username: str) -> StoredModel | None:
        """The user's model with the greatest (time of last write, id)."""
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM models WHERE username = ? ORDER BY updated_at DESC, model_id DESC LIMIT 1",
                (username,),
            ).fetchone()
        return self._row(row)

    def latest_per_user(self) -> list[StoredModel]:
        """One model per user (see :meth:`latest_for`), users in name order."""
        with self._lock:
            users = [r[0] for r in self._conn.execute("SELECT DISTINCT username FROM models ORDER BY username")]
        return [self.latest_for(u) for u in users]
