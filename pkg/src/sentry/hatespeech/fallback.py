"""Fallback verifier protocol.

When the primary model labels a phrase non-hateful, an external yes/no
oracle may be consulted; a "yes"-prefixed answer escalates the label to 1
and records the divergence for future retraining.  Verifier failures are
fail-closed: the label stays 0 and an error counter increments.  A primary
label of 1 is never consulted and never downgraded.
"""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Protocol

import httpx

log = logging.getLogger(__name__)


class FallbackVerifier(Protocol):
    def verify(self, text: str) -> str:
        """Free-form answer; only a 'yes' prefix counts as confirmation."""


class MockVerifier:
    """Deterministic test double: fixed answer or scripted sequence."""

    def __init__(self, answer: str = "no", script: list[str] | None = None, fail: bool = False):
        self.answer = answer
        self.script = list(script) if script else None
        self.fail = fail
        self.calls: list[str] = []

    def verify(self, text: str) -> str:
        self.calls.append(text)
        if self.fail:
            raise RuntimeError("verifier offline")
        if self.script:
            return self.script.pop(0)
        return self.answer


class HttpVerifier:
    """Generic HTTP adapter: POST {"text": ...} expecting {"answer": ...}.

    Disabled unless explicitly configured; tests use MockVerifier.
    """

    def __init__(self, url: str, timeout: float = 15.0):
        self.url = url
        self.timeout = timeout

    def verify(self, text: str) -> str:
        resp = httpx.post(self.url, json={"text": text}, timeout=self.timeout)
        resp.raise_for_status()
        return str(resp.json().get("answer", ""))


class DivergenceStore:
    """Append-only JSON-lines record of verifier escalations."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, text: str, answer: str) -> None:
        record = json.dumps({"text": text, "verifier_answer": answer}, ensure_ascii=False)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(record + "\n")

    def records(self) -> Iterator[dict]:
        if not self.path.exists():
            return iter(())
        with self.path.open("r", encoding="utf-8") as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        return iter(lines)

    def __len__(self) -> int:
        return sum(1 for _ in self.records())


@dataclass
class FallbackCounters:
    consults: int = 0
    escalations: int = 0
    errors: int = 0


def fallback_verify(
    text: str,
    primary_label: int,
    verifier: FallbackVerifier | None,
    store: DivergenceStore | None = None,
    counters: FallbackCounters | None = None,
) -> int:
    if primary_label == 1 or verifier is None:
        return primary_label
    counters = counters if counters is not None else FallbackCounters()
    counters.consults += 1
    try:
        answer = verifier.verify(text)
    except Exception as exc:
        counters.errors += 1
        log.error("fallback verifier unavailable: %s", exc)
        return 0
    if str(answer).strip().lower().startswith("yes"):
        counters.escalations += 1
        if store is not None:
            store.append(text, str(answer))
        return 1
    return 0
