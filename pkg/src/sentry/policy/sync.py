"""Periodic policy synchronization against the gateway.

Agents call sync_policies on their refresh tick; within the interval it is
a no-op, past it the four blacklists are fetched under a bearer token.  Any
fetch failure falls back to the cached policy and bumps an error counter,
so a flaky gateway degrades freshness, never availability.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import httpx

from sentry.policy.model import PolicySet
from sentry.policy.serialize import parse_policy, serialize_policy

log = logging.getLogger(__name__)

POLICY_PATH_ENV = "SENTRY_POLICY_PATH"


class PolicyFetchError(RuntimeError):
    pass


class AuthFailed(PolicyFetchError):
    """Gateway rejected the agent's credentials."""


class NoChange:
    """Sentinel: sync interval not yet elapsed."""

    def __repr__(self) -> str:  # pragma: no cover
        return "NO_CHANGE"


NO_CHANGE = NoChange()


@dataclass
class SyncCounters:
    fetch_errors: int = 0
    auth_failures: int = 0
    syncs: int = 0


def sync_policies(
    client,
    last_version: int,
    now: float,
    last_sync: float,
    delta: float,
    cached: PolicySet | None = None,
    counters: SyncCounters | None = None,
) -> PolicySet | NoChange:
    """Refresh the policy set if the interval elapsed.

    Returns NO_CHANGE inside the interval (no network activity).  On fetch
    or auth failure the cached policy is returned unchanged and the
    matching counter incremented; with no cached policy the error
    propagates, since the agent cannot run without one.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    counters = counters if counters is not None else SyncCounters()
    if now - last_sync < delta:
        return NO_CHANGE
    try:
        fetched = client.fetch()
    except AuthFailed as exc:
        counters.auth_failures += 1
        log.error("policy sync auth failure: %s", exc)
        if cached is None:
            raise
        return cached
    except Exception as exc:
        counters.fetch_errors += 1
        log.error("policy sync failed, keeping version %s: %s", last_version, exc)
        if cached is None:
            raise
        return cached
    counters.syncs += 1
    if cached is not None and fetched.version < cached.version:
        # server rollback would regress agents; keep the newer local copy
        log.warning("server policy version %s older than local %s", fetched.version, cached.version)
        return cached
    return PolicySet(
        blocked_sites=fetched.blocked_sites,
        bad_words=fetched.bad_words,
        malicious_processes=fetched.malicious_processes,
        vulnerable_banners=fetched.vulnerable_banners,
        version=fetched.version,
        fetched_at=now,
    )


_LIST_ENDPOINTS = (
    ("/api/malicious-website", "blocked_sites"),
    ("/api/bad-language", "bad_words"),
    ("/api/malicious-process", "malicious_processes"),
    ("/api/malicious-port", "vulnerable_banners"),
)


class HttpPolicyFetcher:
    """Authenticates against the gateway and pulls all four blacklists."""

    def __init__(self, base_url: str, email: str, password: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.email = email
        self.password = password
        self.timeout = timeout
        self._token: str | None = None

    def _login(self, client: httpx.Client) -> str:
        resp = client.post(
            f"{self.base_url}/api/login",
            json={"email": self.email, "password": self.password},
        )
        if resp.status_code in (401, 403):
            raise AuthFailed(f"login rejected with {resp.status_code}")
        if resp.status_code != 200:
            raise PolicyFetchError(f"login failed with {resp.status_code}")
        return resp.json()["token"]

    def fetch(self) -> PolicySet:
        try:
            with httpx.Client(timeout=self.timeout) as client:
                if self._token is None:
                    self._token = self._login(client)
                headers = {"Authorization": f"Bearer {self._token}"}

                def get(path: str) -> httpx.Response:
                    resp = client.get(f"{self.base_url}{path}", headers=headers)
                    if resp.status_code == 401:
                        # token expired: one re-login attempt
                        self._token = self._login(client)
                        headers["Authorization"] = f"Bearer {self._token}"
                        resp = client.get(f"{self.base_url}{path}", headers=headers)
                    if resp.status_code != 200:
                        raise PolicyFetchError(f"GET {path} -> {resp.status_code}")
                    return resp

                version = int(get("/api/policy-version").json()["version"])
                lists = {attr: get(path).json() for path, attr in _LIST_ENDPOINTS}
        except httpx.HTTPError as exc:
            raise PolicyFetchError(str(exc)) from exc
        return PolicySet(version=version, **lists)


def default_policy_path() -> Path:
    override = os.environ.get(POLICY_PATH_ENV)
    if override:
        return Path(override)
    return Path.home() / ".sentry" / "policy.txt"


def save_policy_file(policy: PolicySet, path: Path | None = None) -> Path:
    path = path or default_policy_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(serialize_policy(policy))
    return path


def load_policy_file(path: Path | None = None) -> PolicySet | None:
    path = path or default_policy_path()
    if not path.exists():
        return None
    return parse_policy(path.read_bytes())
