"""Accounts, password hashing, and bearer tokens.

Passwords are stored as salted PBKDF2 digests; tokens are random,
in-memory, and expire.  Role gates: admins manage blacklists and other
users' data, regular users see only their own alerts.
"""
from __future__ import annotations

import hashlib
import hmac
import re
import secrets
import threading
import time
from dataclasses import dataclass

ROLES = ("admin", "user")
_PBKDF2_ITERS = 60_000

_EMAIL_RE = re.compile(r"^[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}$")


def valid_email(email: str) -> bool:
    return bool(_EMAIL_RE.match(email or ""))


def hash_password(password: str) -> str:
    salt = secrets.token_hex(16)
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), bytes.fromhex(salt), _PBKDF2_ITERS
    )
    return f"pbkdf2${_PBKDF2_ITERS}${salt}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iters, salt, want = stored.split("$")
        if scheme != "pbkdf2":
            return False
        got = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt), int(iters)
        )
        return hmac.compare_digest(got.hex(), want)
    except (ValueError, AttributeError):
        return False


@dataclass(frozen=True)
class Principal:
    user_id: int
    email: str
    role: str


class TokenRegistry:
    def __init__(self, ttl_seconds: float = 3600.0, clock=time.monotonic):
        self.ttl = ttl_seconds
        self.clock = clock
        self._lock = threading.Lock()
        self._tokens: dict[str, tuple[Principal, float]] = {}

    def issue(self, principal: Principal) -> str:
        token = secrets.token_hex(24)
        with self._lock:
            self._tokens[token] = (principal, self.clock() + self.ttl)
        return token

    def resolve(self, token: str) -> Principal | None:
        with self._lock:
            entry = self._tokens.get(token)
            if entry is None:
                return None
            principal, expires = entry
            if self.clock() >= expires:
                del self._tokens[token]
                return None
            return principal

    def revoke(self, token: str) -> None:
        with self._lock:
            self._tokens.pop(token, None)


class LoginRateLimiter:
    """Counts consecutive failures per email; blocks past the limit."""

    def __init__(self, max_failures: int = 5, window_seconds: float = 300.0, clock=time.monotonic):
        self.max_failures = max_failures
        self.window = window_seconds
        self.clock = clock
        self._lock = threading.Lock()
        self._failures: dict[str, list[float]] = {}

    def blocked(self, email: str) -> bool:
        now = self.clock()
        with self._lock:
            recent = [t for t in self._failures.get(email, []) if now - t < self.window]
            self._failures[email] = recent
            return len(recent) >= self.max_failures

    def record_failure(self, email: str) -> None:
        with self._lock:
            self._failures.setdefault(email, []).append(self.clock())

    def reset(self, email: str) -> None:
        with self._lock:
            self._failures.pop(email, None)
