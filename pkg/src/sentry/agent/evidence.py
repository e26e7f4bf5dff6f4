"""Alert-time context capture.

The three capture tasks (process list, screen evidence, telemetry context)
run concurrently; capture latency is the slowest task plus the measured
synchronization overhead of the join step.  Real screenshots are out of
scope: the synthetic provider emits small deterministic PNGs.
"""
from __future__ import annotations

import struct
import time
import uuid
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import psutil

from sentry.agent.events import AgentLatencyStats


class EvidenceUnavailable(RuntimeError):
    """Screen provider failed; the alert ships with an empty-evidence marker."""


class EvidenceProvider(Protocol):
    def screenshot(self) -> bytes: ...


def _png_chunk(tag: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + tag
        + body
        + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)
    )


def synthetic_png(width: int = 8, height: int = 8, shade: int = 0) -> bytes:
    """A tiny valid single-color RGB PNG."""
    shade &= 0xFF
    row = b"\x00" + bytes((shade, 255 - shade, (shade * 7) & 0xFF)) * width
    raw = row * height
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"".join(
        [
            b"\x89PNG\r\n\x1a\n",
            _png_chunk(b"IHDR", ihdr),
            _png_chunk(b"IDAT", zlib.compress(raw)),
            _png_chunk(b"IEND", b""),
        ]
    )


class SyntheticScreenProvider:
    """Deterministic screen evidence: same seed, same byte sequence."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._count = 0

    def screenshot(self) -> bytes:
        shade = (self.seed * 31 + self._count * 17) & 0xFF
        self._count += 1
        return synthetic_png(shade=shade)


def local_process_names() -> tuple[str, ...]:
    names = []
    for proc in psutil.process_iter(["name"]):
        name = proc.info.get("name")
        if name:
            names.append(name)
    return tuple(sorted(set(names)))


def local_mac() -> str:
    node = uuid.getnode()
    return ":".join(f"{(node >> shift) & 0xFF:02X}" for shift in range(40, -8, -8))


@dataclass(frozen=True)
class CaptureResult:
    processes: tuple[str, ...]
    mac: str
    screen: bytes
    stats: AgentLatencyStats
    evidence_missing: bool = False


def capture_evidence(
    source_id: str,
    screen_provider: EvidenceProvider,
    process_provider: Callable[[], Sequence[str]] | None = None,
    telemetry_provider: Callable[[], object] | None = None,
    mac_provider: Callable[[], str] | None = None,
) -> CaptureResult:
    """Run the three capture tasks concurrently and time them.

    EvidenceUnavailable from the screen task degrades to an empty blob:
    alert availability beats evidence completeness.
    """
    process_provider = process_provider or local_process_names
    telemetry_provider = telemetry_provider or (lambda: None)
    mac_provider = mac_provider or local_mac

    durations = {}

    def timed(name: str, fn: Callable[[], object]):
        t0 = time.perf_counter()
        try:
            return fn()
        finally:
            durations[name] = time.perf_counter() - t0

    missing = False
    with ThreadPoolExecutor(max_workers=3) as pool:
        f_proc = pool.submit(timed, "proc", process_provider)
        f_screen = pool.submit(timed, "screen", screen_provider.screenshot)
        f_tele = pool.submit(timed, "telemetry", telemetry_provider)
        join_start = time.perf_counter()
        processes = tuple(str(p) for p in f_proc.result())
        try:
            screen = f_screen.result()
            if not screen:
                raise EvidenceUnavailable("provider returned empty blob")
        except EvidenceUnavailable:
            screen = b""
            missing = True
        f_tele.result()
        delta_sync = time.perf_counter() - join_start - max(durations.values(), default=0.0)
        delta_sync = max(delta_sync, 0.0)

    stats = AgentLatencyStats.from_parts(
        t_proc=durations["proc"],
        t_screen=durations["screen"],
        t_telemetry=durations["telemetry"],
        delta_sync=delta_sync,
    )
    return CaptureResult(
        processes=processes,
        mac=mac_provider(),
        screen=screen,
        stats=stats,
        evidence_missing=missing,
    )
