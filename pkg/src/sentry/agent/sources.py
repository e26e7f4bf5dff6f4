"""Telemetry source drivers.

Raw OS hooks (packet capture, keystroke hooks, screenshots) are out of
scope; sources deliver ready-made events instead.  Replay reads JSON-lines
files for deterministic tests, the synthetic generator produces seeded
streams, and the socket listener accepts live JSON-lines feeds.  A
typed_phrase event always carries a complete phrase; live keystroke
adapters are expected to flush on newline or a 5 s idle gap.
"""
from __future__ import annotations

import json
import socket
from pathlib import Path
from typing import Iterator, Protocol

import numpy as np

from sentry.agent.events import TelemetryEvent
from sentry.policy.model import PolicySet


class MalformedReplay(ValueError):
    """Replay line unparseable or timestamps regress within a source."""


class TelemetrySource(Protocol):
    name: str

    def events(self) -> Iterator[TelemetryEvent]: ...


class ReplaySource:
    """JSON-lines replay; enforces per-source monotone timestamps."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.name = f"replay:{self.path.name}"

    def events(self) -> Iterator[TelemetryEvent]:
        last_at: dict[str, float] = {}
        with self.path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = TelemetryEvent.from_line(line)
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise MalformedReplay(f"{self.path}:{lineno}: {exc}") from exc
                prev = last_at.get(event.source_id)
                if prev is not None and event.at < prev:
                    raise MalformedReplay(
                        f"{self.path}:{lineno}: timestamp regression for {event.source_id}"
                    )
                last_at[event.source_id] = event.at
                yield event


class SyntheticSource:
    """Seeded event generator; a fraction of events match the policy."""

    def __init__(
        self,
        seed: int,
        n_events: int = 100,
        policy: PolicySet | None = None,
        hit_rate: float = 0.1,
        source_id: str = "synth-0",
        mac: str = "AA:BB:CC:DD:EE:FF",
    ):
        self.seed = seed
        self.n_events = n_events
        self.policy = policy
        self.hit_rate = hit_rate
        self.source_id = source_id
        self.mac = mac
        self.name = f"synthetic:{source_id}"

    def events(self) -> Iterator[TelemetryEvent]:
        rng = np.random.default_rng(self.seed)
        pol = self.policy or PolicySet()
        benign_domains = ["news.example", "mail.example", "docs.example"]
        benign_phrases = ["weekly report attached", "lunch at noon", "meeting moved"]
        benign_procs = [["editor", "browser"], ["shell", "mailer"]]
        at = 0.0
        for i in range(self.n_events):
            at += float(rng.exponential(0.5))
            kind = ("dns_query", "typed_phrase", "process_snapshot", "port_banner")[
                int(rng.integers(0, 4))
            ]
            hit = bool(rng.random() < self.hit_rate)
            if kind == "dns_query":
                pool = sorted(pol.blocked_sites) if hit and pol.blocked_sites else benign_domains
                payload: object = pool[int(rng.integers(0, len(pool)))]
            elif kind == "typed_phrase":
                if hit and pol.bad_words:
                    words = sorted(pol.bad_words)
                    payload = f"note {words[int(rng.integers(0, len(words)))]} today"
                else:
                    payload = benign_phrases[int(rng.integers(0, len(benign_phrases)))]
            elif kind == "process_snapshot":
                procs = list(benign_procs[int(rng.integers(0, len(benign_procs)))])
                if hit and pol.malicious_processes:
                    bad = sorted(pol.malicious_processes)
                    procs.append(bad[int(rng.integers(0, len(bad)))])
                payload = procs
            else:
                port = int(rng.integers(1, 65536))
                banner = "generic-service 1.0"
                if hit and pol.vulnerable_banners:
                    from sentry.policy.model import parse_banner_entry

                    entries = sorted(pol.vulnerable_banners)
                    entry_port, needle = parse_banner_entry(entries[int(rng.integers(0, len(entries)))])
                    banner = f"{needle} build"
                    if entry_port is not None:
                        port = entry_port
                payload = {"port": port, "banner": banner}
            yield TelemetryEvent(
                kind=kind, payload=payload, source_id=self.source_id, mac=self.mac, at=at
            )


class SocketSource:
    """Accepts one TCP connection and streams JSON-lines events until EOF."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, accept_timeout: float = 30.0):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(1)
        self._sock.settimeout(accept_timeout)
        self.address = self._sock.getsockname()
        self.name = f"socket:{self.address[0]}:{self.address[1]}"

    def events(self) -> Iterator[TelemetryEvent]:
        conn, _peer = self._sock.accept()
        try:
            buf = b""
            while True:
                chunk = conn.recv(4096)
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    text = line.decode("utf-8").strip()
                    if text:
                        yield TelemetryEvent.from_line(text)
            if buf.strip():
                yield TelemetryEvent.from_line(buf.decode("utf-8").strip())
        finally:
            conn.close()
            self._sock.close()
