"""Request payload validation.

Persistence is parameterized end to end, so injection strings cannot
execute; on top of that, free-text fields matching injection signatures
(statement terminators plus SQL keywords, or shell metacharacter
sequences) are rejected outright with 400 and a machine-readable
violation code.  Emails, port ranges, and evidence size are checked here
too.
"""
from __future__ import annotations

import base64
import re
from dataclasses import dataclass

from sentry.agent.events import valid_mac
from sentry.gateway.auth import valid_email

DEFAULT_MAX_IMAGE_BYTES = 1_048_576

_SQL_INJECTION = re.compile(
    r"(;\s*(drop|delete|truncate|alter|insert|update|create|grant|exec)\b)"
    r"|('\s*;)"
    r"|('\s*(or|and)\b.*=)"
    r"|(--\s*$)"
    r"|(\bunion\s+select\b)",
    re.IGNORECASE,
)

_CMD_INJECTION = re.compile(
    r"(;\s*\S+)"  # command chaining after a terminator
    r"|(&&|\|\|)"
    r"|(`)"
    r"|(\$\()"
    r"|(\|\s*\w+)"
    r"|(>{1,2}\s*/)",
)


@dataclass(frozen=True)
class ValidationFailure(Exception):
    code: str
    field: str
    detail: str = ""

    def body(self) -> dict:
        return {"error": self.code, "field": self.field, "detail": self.detail}


def injection_code(text: str) -> str | None:
    if _SQL_INJECTION.search(text):
        return "sql_injection"
    if _CMD_INJECTION.search(text):
        return "command_injection"
    return None


def _require(body: dict, name: str, kind=str):
    if name not in body or body[name] is None:
        raise ValidationFailure("missing_field", name)
    value = body[name]
    if kind is not None and not isinstance(value, kind):
        raise ValidationFailure("bad_type", name, f"expected {getattr(kind, '__name__', kind)}")
    return value


def _check_free_text(name: str, value: str) -> str:
    code = injection_code(value)
    if code:
        raise ValidationFailure(code, name)
    return value


def _check_port(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationFailure("bad_type", "port", "expected integer")
    if not 1 <= value <= 65535:
        raise ValidationFailure("port_out_of_range", "port", f"{value} outside 1..65535")
    return value


def _decode_image(value: str, max_bytes: int) -> bytes:
    try:
        blob = base64.b64decode(value, validate=True)
    except Exception as exc:
        raise ValidationFailure("bad_image_encoding", "content", str(exc)) from exc
    if len(blob) > max_bytes:
        raise ValidationFailure("image_too_large", "content", f"{len(blob)} > {max_bytes} bytes")
    return blob


def validate_alert(body: dict, max_image_bytes: int) -> dict:
    out: dict = {}
    out["pc_id"] = _check_free_text("pcId", _require(body, "pcId"))
    process = body.get("process", [])
    if isinstance(process, str):
        process = [process]
    if not isinstance(process, list):
        raise ValidationFailure("bad_type", "process", "expected string or list")
    out["process"] = [_check_free_text("process", str(p)) for p in process]
    reason = body.get("reason", "")
    out["reason"] = _check_free_text("reason", str(reason)) if reason else ""
    mac = body.get("mac")
    if mac is not None:
        if not isinstance(mac, str) or not valid_mac(mac):
            raise ValidationFailure("bad_mac", "mac")
        out["mac"] = mac
    score = body.get("score", 0.0)
    if isinstance(score, bool) or not isinstance(score, (int, float)):
        raise ValidationFailure("bad_type", "score", "expected number")
    if score < 0:
        raise ValidationFailure("bad_value", "score", "must be non-negative")
    out["score"] = float(score)
    indicators = body.get("indicators")
    if indicators is not None:
        if not isinstance(indicators, dict):
            raise ValidationFailure("bad_type", "indicators")
        for key, val in indicators.items():
            if val not in (0, 1):
                raise ValidationFailure("bad_value", f"indicators.{key}", "must be 0 or 1")
        out["indicators"] = {str(k): int(v) for k, v in indicators.items()}
    if "register_date" in body and body["register_date"] is not None:
        rd = body["register_date"]
        if not isinstance(rd, (str, int, float)):
            raise ValidationFailure("bad_type", "register_date")
        if isinstance(rd, str):
            _check_free_text("register_date", rd)
        out["register_date"] = rd
    image = body.get("image")
    if image is not None:
        if not isinstance(image, dict):
            raise ValidationFailure("bad_type", "image", "expected object")
        if "id" in image and image["id"] is not None:
            if isinstance(image["id"], bool) or not isinstance(image["id"], int):
                raise ValidationFailure("bad_type", "image.id", "expected integer")
            out["image_id"] = image["id"]
        elif "content" in image and image["content"] is not None:
            if not isinstance(image["content"], str):
                raise ValidationFailure("bad_type", "image.content")
            out["image_blob"] = _decode_image(image["content"], max_image_bytes)
    if "id" in body and body["id"] is not None:
        out["client_id"] = str(body["id"])
    if "policy_version" in body and body["policy_version"] is not None:
        if isinstance(body["policy_version"], bool) or not isinstance(body["policy_version"], int):
            raise ValidationFailure("bad_type", "policy_version")
        out["policy_version"] = body["policy_version"]
    return out


def validate_image(body: dict, max_image_bytes: int) -> dict:
    content = _require(body, "content")
    return {"blob": _decode_image(content, max_image_bytes)}


def validate_user(body: dict) -> dict:
    email = _require(body, "email")
    if not valid_email(email):
        raise ValidationFailure("bad_email", "email")
    password = _require(body, "password")
    if len(password) < 8:
        raise ValidationFailure("weak_password", "password", "minimum 8 characters")
    role = body.get("role", "user")
    if role not in ("admin", "user"):
        raise ValidationFailure("bad_value", "role", "must be admin or user")
    return {"email": email, "password": password, "role": role}


def validate_login(body: dict) -> dict:
    email = _require(body, "email")
    password = _require(body, "password")
    if not password:
        raise ValidationFailure("missing_field", "password")
    _check_free_text("email", email)
    return {"email": email, "password": password}


def validate_blacklist_entry(body: dict) -> dict:
    value = _require(body, "value")
    value = value.strip()
    if not value:
        raise ValidationFailure("missing_field", "value")
    if ";" in value:
        raise ValidationFailure("bad_value", "value", "';' is the policy delimiter")
    _check_free_text("value", value)
    return {"value": value}


def validate_port_entry(body: dict) -> dict:
    port = _check_port(_require(body, "port", kind=int))
    banner = str(body.get("banner", "")).strip()
    if banner:
        if ";" in banner:
            raise ValidationFailure("bad_value", "banner", "';' is the policy delimiter")
        _check_free_text("banner", banner)
    return {"port": port, "banner": banner}


_VALIDATORS = {
    "alert": validate_alert,
    "image": validate_image,
    "user": validate_user,
    "login": validate_login,
    "blacklist": validate_blacklist_entry,
    "port": validate_port_entry,
}


def validate_payload(endpoint: str, body: dict, max_image_bytes: int = DEFAULT_MAX_IMAGE_BYTES) -> dict:
    """Sanitized payload for the endpoint family; ValidationFailure on any
    violation (mapped to HTTP 400 by the handlers)."""
    if not isinstance(body, dict):
        raise ValidationFailure("bad_type", "body", "expected JSON object")
    validator = _VALIDATORS.get(endpoint)
    if validator is None:
        raise KeyError(f"unknown endpoint family {endpoint!r}")
    if endpoint in ("alert", "image"):
        return validator(body, max_image_bytes)
    return validator(body)
