"""Persistence backends.

Records are JSON documents in named tables with sequential integer ids
(monotone per table, for insert locality).  Binary evidence blobs are kept
decoded at rest, outside the document tables.  Two backends implement the
same surface: a file-backed embedded store (default; in-memory when no
root is given) and a sqlite relational backend whose statements are fully
parameterized.  Table names come from the fixed TABLES allowlist, never
from request input.
"""
from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path
from typing import Callable, Iterable, Protocol

TABLES = (
    "users",
    "alerts",
    "images",
    "sites",
    "words",
    "processes",
    "ports",
    "outbox",
    "dead_letters",
    "policy_events",
)


class StorageBackend(Protocol):
    def insert(self, table: str, record: dict) -> int: ...

    def get(self, table: str, rec_id: int) -> dict | None: ...

    def delete(self, table: str, rec_id: int) -> bool: ...

    def rows(self, table: str) -> list[dict]: ...

    def find(self, table: str, predicate: Callable[[dict], bool]) -> list[dict]: ...

    def put_blob(self, blob: bytes) -> int: ...

    def get_blob(self, blob_id: int) -> bytes | None: ...

    def delete_blob(self, blob_id: int) -> bool: ...


def _check_table(table: str) -> None:
    if table not in TABLES:
        raise KeyError(f"unknown table {table!r}")


class FileStore:
    """Embedded store; durable when ``root`` is set, in-memory otherwise.

    Every mutation rewrites the JSON snapshot atomically (temp + rename),
    so a reader never observes a torn file; blobs live under root/blobs.
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root else None
        self._lock = threading.RLock()
        self._tables: dict[str, dict[int, dict]] = {t: {} for t in TABLES}
        self._seq: dict[str, int] = {t: 0 for t in TABLES}
        self._blob_seq = 0
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "blobs").mkdir(exist_ok=True)
            self._load()

    # -- snapshot ----------------------------------------------------

    def _data_path(self) -> Path:
        return self.root / "data.json"

    def _load(self) -> None:
        path = self._data_path()
        if not path.exists():
            return
        doc = json.loads(path.read_text(encoding="utf-8"))
        for table in TABLES:
            rows = doc.get("tables", {}).get(table, {})
            self._tables[table] = {int(k): v for k, v in rows.items()}
        self._seq = {t: int(doc.get("seq", {}).get(t, 0)) for t in TABLES}
        self._blob_seq = int(doc.get("blob_seq", 0))

    def _flush(self) -> None:
        if not self.root:
            return
        doc = {
            "tables": {t: {str(k): v for k, v in rows.items()} for t, rows in self._tables.items()},
            "seq": self._seq,
            "blob_seq": self._blob_seq,
        }
        tmp = self._data_path().with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
        tmp.replace(self._data_path())

    # -- records -----------------------------------------------------

    def insert(self, table: str, record: dict) -> int:
        _check_table(table)
        with self._lock:
            self._seq[table] += 1
            rec_id = self._seq[table]
            stored = dict(record)
            stored["id"] = rec_id
            self._tables[table][rec_id] = stored
            self._flush()
            return rec_id

    def get(self, table: str, rec_id: int) -> dict | None:
        _check_table(table)
        with self._lock:
            rec = self._tables[table].get(int(rec_id))
            return dict(rec) if rec else None

    def delete(self, table: str, rec_id: int) -> bool:
        _check_table(table)
        with self._lock:
            existed = self._tables[table].pop(int(rec_id), None) is not None
            if existed:
                self._flush()
            return existed

    def rows(self, table: str) -> list[dict]:
        _check_table(table)
        with self._lock:
            return [dict(r) for _, r in sorted(self._tables[table].items())]

    def find(self, table: str, predicate: Callable[[dict], bool]) -> list[dict]:
        return [r for r in self.rows(table) if predicate(r)]

    # -- blobs ---------------------------------------------------------

    def put_blob(self, blob: bytes) -> int:
        with self._lock:
            self._blob_seq += 1
            blob_id = self._blob_seq
            if self.root:
                (self.root / "blobs" / f"{blob_id}.bin").write_bytes(blob)
            else:
                self._mem_blobs()[blob_id] = blob
            self._flush()
            return blob_id

    def get_blob(self, blob_id: int) -> bytes | None:
        with self._lock:
            if self.root:
                path = self.root / "blobs" / f"{int(blob_id)}.bin"
                return path.read_bytes() if path.exists() else None
            return self._mem_blobs().get(int(blob_id))

    def delete_blob(self, blob_id: int) -> bool:
        with self._lock:
            if self.root:
                path = self.root / "blobs" / f"{int(blob_id)}.bin"
                if path.exists():
                    path.unlink()
                    return True
                return False
            return self._mem_blobs().pop(int(blob_id), None) is not None

    def _mem_blobs(self) -> dict[int, bytes]:
        if not hasattr(self, "_blobs"):
            self._blobs: dict[int, bytes] = {}
        return self._blobs


class SqliteStore:
    """Relational backend; every statement is parameterized."""

    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._lock = threading.RLock()
        with self._lock:
            for table in TABLES:
                # table names come from the module-level allowlist above
                self._conn.execute(
                    f"CREATE TABLE IF NOT EXISTS {table} (id INTEGER PRIMARY KEY AUTOINCREMENT, doc TEXT NOT NULL)"
                )
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS blobs (id INTEGER PRIMARY KEY AUTOINCREMENT, data BLOB NOT NULL)"
            )
            self._conn.commit()

    def insert(self, table: str, record: dict) -> int:
        _check_table(table)
        with self._lock:
            cur = self._conn.execute(f"INSERT INTO {table} (doc) VALUES (?)", ("{}",))
            rec_id = cur.lastrowid
            stored = dict(record)
            stored["id"] = rec_id
            self._conn.execute(
                f"UPDATE {table} SET doc = ? WHERE id = ?", (json.dumps(stored), rec_id)
            )
            self._conn.commit()
            return rec_id

    def get(self, table: str, rec_id: int) -> dict | None:
        _check_table(table)
        with self._lock:
            row = self._conn.execute(
                f"SELECT doc FROM {table} WHERE id = ?", (int(rec_id),)
            ).fetchone()
        return json.loads(row[0]) if row else None

    def delete(self, table: str, rec_id: int) -> bool:
        _check_table(table)
        with self._lock:
            cur = self._conn.execute(f"DELETE FROM {table} WHERE id = ?", (int(rec_id),))
            self._conn.commit()
            return cur.rowcount > 0

    def rows(self, table: str) -> list[dict]:
        _check_table(table)
        with self._lock:
            rows = self._conn.execute(f"SELECT doc FROM {table} ORDER BY id").fetchall()
        return [json.loads(r[0]) for r in rows]

    def find(self, table: str, predicate: Callable[[dict], bool]) -> list[dict]:
        return [r for r in self.rows(table) if predicate(r)]

    def put_blob(self, blob: bytes) -> int:
        with self._lock:
            cur = self._conn.execute("INSERT INTO blobs (data) VALUES (?)", (blob,))
            self._conn.commit()
            return cur.lastrowid

    def get_blob(self, blob_id: int) -> bytes | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM blobs WHERE id = ?", (int(blob_id),)
            ).fetchone()
        return bytes(row[0]) if row else None

    def delete_blob(self, blob_id: int) -> bool:
        with self._lock:
            cur = self._conn.execute("DELETE FROM blobs WHERE id = ?", (int(blob_id),))
            self._conn.commit()
            return cur.rowcount > 0


def table_sizes(store: StorageBackend, tables: Iterable[str] = TABLES) -> dict[str, int]:
    return {t: len(store.rows(t)) for t in tables}
