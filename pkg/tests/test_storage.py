from __future__ import annotations

import threading

import pytest

from sentry.gateway.storage import FileStore, SqliteStore, table_sizes


@pytest.fixture(params=["file-memory", "file-disk", "sqlite"])
def store(request, tmp_path):
    if request.param == "file-memory":
        return FileStore(None)
    if request.param == "file-disk":
        return FileStore(tmp_path / "store")
    return SqliteStore(":memory:")


class TestCrud:
    def test_insert_assigns_sequential_ids(self, store):
        ids = [store.insert("alerts", {"pc_id": f"pc-{i}"}) for i in range(5)]
        assert ids == [1, 2, 3, 4, 5]

    def test_read_your_writes(self, store):
        rec_id = store.insert("alerts", {"pc_id": "pc-9", "score": 2.0})
        got = store.get("alerts", rec_id)
        assert got["pc_id"] == "pc-9" and got["id"] == rec_id
        assert any(r["id"] == rec_id for r in store.rows("alerts"))

    def test_delete(self, store):
        rec_id = store.insert("words", {"value": "slur"})
        assert store.delete("words", rec_id) is True
        assert store.get("words", rec_id) is None
        assert store.delete("words", rec_id) is False

    def test_find_predicate(self, store):
        store.insert("users", {"email": "a@example.com", "role": "admin"})
        store.insert("users", {"email": "b@example.com", "role": "user"})
        admins = store.find("users", lambda r: r["role"] == "admin")
        assert [r["email"] for r in admins] == ["a@example.com"]

    def test_unknown_table_rejected(self, store):
        with pytest.raises(KeyError):
            store.insert("nope", {})

    def test_blobs_round_trip(self, store):
        blob = bytes(range(256)) * 4
        blob_id = store.put_blob(blob)
        assert store.get_blob(blob_id) == blob
        assert store.delete_blob(blob_id) is True
        assert store.get_blob(blob_id) is None

    def test_table_sizes(self, store):
        store.insert("alerts", {})
        store.insert("alerts", {})
        sizes = table_sizes(store)
        assert sizes["alerts"] == 2 and sizes["users"] == 0

    def test_concurrent_inserts_unique_ids(self, store):
        ids = []
        lock = threading.Lock()

        def worker():
            for _ in range(50):
                rec_id = store.insert("outbox", {"n": 1})
                with lock:
                    ids.append(rec_id)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(ids)) == 200


class TestFileStoreDurability:
    def test_survives_reopen(self, tmp_path):
        root = tmp_path / "store"
        store = FileStore(root)
        alert_id = store.insert("alerts", {"pc_id": "pc-1"})
        blob_id = store.put_blob(b"evidence-bytes")
        reopened = FileStore(root)
        assert reopened.get("alerts", alert_id)["pc_id"] == "pc-1"
        assert reopened.get_blob(blob_id) == b"evidence-bytes"
        # sequences continue, never reuse
        assert reopened.insert("alerts", {}) == alert_id + 1

    def test_blob_stored_decoded_at_rest(self, tmp_path):
        root = tmp_path / "store"
        store = FileStore(root)
        payload = b"\x89PNG-raw-binary"
        blob_id = store.put_blob(payload)
        on_disk = (root / "blobs" / f"{blob_id}.bin").read_bytes()
        assert on_disk == payload


class TestSqliteParameterization:
    def test_injection_strings_stored_inert(self):
        """Hostile strings go through parameterized statements as data."""
        store = SqliteStore(":memory:")
        hostile = "string'; DROP TABLE alerts; --"
        rec_id = store.insert("alerts", {"process": hostile})
        assert store.get("alerts", rec_id)["process"] == hostile
        # table still there and intact
        assert store.rows("alerts")
