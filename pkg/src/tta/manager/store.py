"""Embedded persistence for sessions and match records.

One sqlite file holds everything; rows are JSON documents keyed by id, so
the schema stays stable while the document shapes evolve behind the
version stamp. Writers commit per call: a crash between calls loses at
most the in-flight update.
"""

from __future__ import annotations

import json
import sqlite3
import time
from pathlib import Path
from typing import Optional

SCHEMA_VERSION = 1


class StoreError(RuntimeError):
    pass


class SessionStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        # The service touches the store from worker threads; sqlite's default
        # same-thread guard is off and calls are serialized by commit-per-call.
        self._db = sqlite3.connect(self.path, check_same_thread=False)
        self._init_schema()

    def _init_schema(self) -> None:
        cur = self._db.cursor()
        cur.execute("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT)")
        cur.execute(
            "CREATE TABLE IF NOT EXISTS sessions ("
            " session_id TEXT PRIMARY KEY,"
            " created_at REAL NOT NULL,"
            " doc TEXT NOT NULL)"
        )
        cur.execute(
            "CREATE TABLE IF NOT EXISTS matches ("
            " match_id INTEGER PRIMARY KEY AUTOINCREMENT,"
            " session_id TEXT NOT NULL,"
            " created_at REAL NOT NULL,"
            " doc TEXT NOT NULL)"
        )
        cur.execute("SELECT value FROM meta WHERE key = 'schema_version'")
        row = cur.fetchone()
        if row is None:
            cur.execute(
                "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                (str(SCHEMA_VERSION),),
            )
        elif int(row[0]) != SCHEMA_VERSION:
            raise StoreError(
                f"store at {self.path} has schema version {row[0]}, "
                f"this build expects {SCHEMA_VERSION}"
            )
        self._db.commit()

    def save_session(self, session_id: str, doc: dict) -> None:
        self._db.execute(
            "INSERT INTO sessions (session_id, created_at, doc) VALUES (?, ?, ?)"
            " ON CONFLICT(session_id) DO UPDATE SET doc = excluded.doc",
            (session_id, time.time(), json.dumps(doc)),
        )
        self._db.commit()

    def load_session(self, session_id: str) -> Optional[dict]:
        cur = self._db.execute(
            "SELECT doc FROM sessions WHERE session_id = ?", (session_id,)
        )
        row = cur.fetchone()
        return json.loads(row[0]) if row else None

    def list_sessions(self) -> list[dict]:
        cur = self._db.execute("SELECT doc FROM sessions ORDER BY created_at")
        return [json.loads(r[0]) for r in cur.fetchall()]

    def append_match(self, session_id: str, doc: dict) -> int:
        cur = self._db.execute(
            "INSERT INTO matches (session_id, created_at, doc) VALUES (?, ?, ?)",
            (session_id, time.time(), json.dumps(doc)),
        )
        self._db.commit()
        return int(cur.lastrowid)

    def update_match(self, match_id: int, doc: dict) -> None:
        cur = self._db.execute(
            "UPDATE matches SET doc = ? WHERE match_id = ?", (json.dumps(doc), match_id)
        )
        if cur.rowcount != 1:
            raise StoreError(f"no match row {match_id}")
        self._db.commit()

    def load_matches(self, session_id: str) -> list[dict]:
        cur = self._db.execute(
            "SELECT doc FROM matches WHERE session_id = ? ORDER BY match_id",
            (session_id,),
        )
        return [json.loads(r[0]) for r in cur.fetchall()]

    def close(self) -> None:
        self._db.close()
