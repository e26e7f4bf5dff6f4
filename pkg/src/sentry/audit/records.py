from __future__ import annotations

import hashlib
import hmac
import json
from dataclasses import dataclass
from typing import Any


class MissingAlert(KeyError):
    """Alert id not found in the store."""


class MalformedExport(ValueError):
    """Export document is not a valid AlertExport."""


def generate_hash(alert_id: str, pc_id: str) -> str:
    """SHA-256 over UTF-8 bytes of alert_id || pc_id, lowercase hex."""
    if not alert_id or not pc_id:
        raise ValueError("alert_id and pc_id must be non-empty")
    digest = hashlib.sha256((alert_id + pc_id).encode("utf-8")).digest()
    return "".join(f"{b:02x}" for b in digest)


def generate_hash_v2(alert_id: str, pc_id: str, record_json: str = "") -> str:
    """Length-prefixed variant covering the full canonical record."""
    if not alert_id or not pc_id:
        raise ValueError("alert_id and pc_id must be non-empty")
    parts = []
    for piece in (alert_id, pc_id, record_json):
        raw = piece.encode("utf-8")
        parts.append(str(len(raw)).encode("ascii") + b":" + raw)
    return hashlib.sha256(b"|".join(parts)).hexdigest()


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class AlertExport:
    alert: dict
    hash: str
    hashed_fields: str
    hash_version: int = 1

    def to_json(self) -> str:
        """Canonical key order so repeated exports are byte-identical."""
        return _canonical_json(
            {
                "alert": self.alert,
                "hash": self.hash,
                "hashed_fields": self.hashed_fields,
                "hash_version": self.hash_version,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "AlertExport":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedExport(f"not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "AlertExport":
        if not isinstance(doc, dict):
            raise MalformedExport("export must be a JSON object")
        missing = {"alert", "hash", "hashed_fields"} - set(doc)
        if missing:
            raise MalformedExport(f"missing fields: {sorted(missing)}")
        if not isinstance(doc["alert"], dict):
            raise MalformedExport("alert must be an object")
        return cls(
            alert=doc["alert"],
            hash=doc["hash"],
            hashed_fields=doc["hashed_fields"],
            hash_version=int(doc.get("hash_version", 1)),
        )


def export_alert(alert: dict, hash_version: int = 1) -> AlertExport:
    """Build the tamper-evident export for a persisted alert record.

    The alert dict must carry ``id`` and ``pc_id``; everything else is
    included verbatim as metadata (timestamp, reason, evidence reference).
    """
    if "id" not in alert or "pc_id" not in alert:
        raise MissingAlert("alert record must carry id and pc_id")
    alert_id = str(alert["id"])
    pc_id = str(alert["pc_id"])
    if hash_version == 2:
        body = _canonical_json(alert)
        digest = generate_hash_v2(alert_id, pc_id, body)
        fields = "len(id):id|len(pcId):pcId|len(record):record"
    else:
        digest = generate_hash(alert_id, pc_id)
        fields = "id||pcId"
    return AlertExport(alert=dict(alert), hash=digest, hashed_fields=fields, hash_version=hash_version)


@dataclass(frozen=True)
class VerifyResult:
    valid: bool
    reason: str = ""


def verify_export(doc: AlertExport | dict | str) -> VerifyResult:
    """Recompute the digest and compare in constant time."""
    if isinstance(doc, str):
        doc = AlertExport.from_json(doc)
    elif isinstance(doc, dict):
        doc = AlertExport.from_dict(doc)
    alert = doc.alert
    if "id" not in alert or "pc_id" not in alert:
        return VerifyResult(False, "alert record lacks id/pc_id")
    alert_id = str(alert["id"])
    pc_id = str(alert["pc_id"])
    if doc.hash_version == 2:
        expected = generate_hash_v2(alert_id, pc_id, _canonical_json(alert))
    elif doc.hash_version == 1:
        expected = generate_hash(alert_id, pc_id)
    else:
        return VerifyResult(False, f"unknown hash_version {doc.hash_version}")
    if hmac.compare_digest(expected, str(doc.hash)):
        return VerifyResult(True)
    return VerifyResult(False, "hash mismatch")
