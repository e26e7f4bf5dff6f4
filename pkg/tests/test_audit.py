from __future__ import annotations

import json
import string

import numpy as np
import pytest

from sentry.audit.records import (
    AlertExport,
    MalformedExport,
    MissingAlert,
    export_alert,
    generate_hash,
    generate_hash_v2,
    verify_export,
)
from tests.reference_sha256 import sha256_hex


def sample_alert(**extra):
    alert = {
        "id": 7,
        "pc_id": "PC-01",
        "mac": "AA:BB:CC:00:11:22",
        "register_date": 1700000000.0,
        "reason": "dns",
        "score": 2.0,
        "image_ref": 3,
    }
    alert.update(extra)
    return alert


class TestGenerateHash:
    def test_deterministic(self):
        assert generate_hash("1", "PC-A") == generate_hash("1", "PC-A")

    def test_64_lowercase_hex(self):
        digest = generate_hash("1", "PC-01")
        assert len(digest) == 64
        assert all(c in string.hexdigits.lower() for c in digest)

    def test_matches_independent_reference(self):
        assert generate_hash("1", "PC-01") == sha256_hex(b"1PC-01")

    def test_reference_equality_on_random_pairs(self):
        rng = np.random.default_rng(1)
        alphabet = string.ascii_letters + string.digits + "-_."
        for _ in range(120):
            a = "".join(rng.choice(list(alphabet), size=rng.integers(1, 12)))
            b = "".join(rng.choice(list(alphabet), size=rng.integers(1, 12)))
            assert generate_hash(a, b) == sha256_hex((a + b).encode("utf-8"))

    def test_concatenation_collision_documented_hazard(self):
        # plain concatenation cannot distinguish the boundary
        assert generate_hash("1", "PC-A") == generate_hash("1P", "C-A")
        # the length-prefixed v2 scheme does
        assert generate_hash_v2("1", "PC-A") != generate_hash_v2("1P", "C-A")

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            generate_hash("", "x")
        with pytest.raises(ValueError):
            generate_hash("x", "")


class TestExportVerify:
    def test_round_trip_valid(self):
        export = export_alert(sample_alert())
        assert verify_export(export).valid

    def test_single_byte_mutation_detected(self):
        export = export_alert(sample_alert())
        tampered = dict(export.alert)
        tampered["pc_id"] = "PC-02"
        doc = AlertExport(alert=tampered, hash=export.hash, hashed_fields=export.hashed_fields)
        result = verify_export(doc)
        assert not result.valid and result.reason == "hash mismatch"

    def test_hash_field_mutation_detected(self):
        export = export_alert(sample_alert())
        flipped = ("0" if export.hash[0] != "0" else "1") + export.hash[1:]
        doc = AlertExport(alert=export.alert, hash=flipped, hashed_fields=export.hashed_fields)
        assert not verify_export(doc).valid

    def test_exports_byte_identical(self):
        a = export_alert(sample_alert()).to_json()
        b = export_alert(sample_alert()).to_json()
        assert a.encode() == b.encode()

    def test_canonical_key_order(self):
        text = export_alert(sample_alert()).to_json()
        doc = json.loads(text)
        assert list(doc) == sorted(doc)

    def test_missing_ids_rejected(self):
        with pytest.raises(MissingAlert):
            export_alert({"reason": "x"})

    def test_malformed_json_rejected(self):
        with pytest.raises(MalformedExport):
            AlertExport.from_json("{not json")
        with pytest.raises(MalformedExport):
            AlertExport.from_dict({"alert": {}})

    def test_v1_content_change_not_detected_v2_detected(self):
        # v1 hashes only id||pcId: body tampering passes; that is the
        # documented hazard the v2 mode exists for
        v1 = export_alert(sample_alert())
        tampered = dict(v1.alert)
        tampered["reason"] = "edited"
        assert verify_export(
            AlertExport(alert=tampered, hash=v1.hash, hashed_fields=v1.hashed_fields)
        ).valid
        v2 = export_alert(sample_alert(), hash_version=2)
        assert verify_export(v2).valid
        tampered2 = dict(v2.alert)
        tampered2["reason"] = "edited"
        assert not verify_export(
            AlertExport(
                alert=tampered2, hash=v2.hash, hashed_fields=v2.hashed_fields, hash_version=2
            )
        ).valid

    def test_verify_accepts_json_text(self):
        text = export_alert(sample_alert()).to_json()
        assert verify_export(text).valid

    def test_unknown_hash_version(self):
        export = export_alert(sample_alert())
        doc = AlertExport(
            alert=export.alert, hash=export.hash, hashed_fields=export.hashed_fields, hash_version=9
        )
        result = verify_export(doc)
        assert not result.valid and "hash_version" in result.reason
