"""Queue-window estimators and a small discrete-event simulator.

``queue_stats`` turns per-job (arrival, start, finish) timestamps into the
three Little's-law quantities measured over one observation window:
arrival rate lambda, mean time in system W, and time-averaged number in
system L.  On a stable queue, L ~= lambda * W up to window edge effects.

``simulate_poisson_queue`` generates jobs from a seeded Poisson arrival
process through a c-server FIFO station in virtual time, so stability
checks run in milliseconds rather than wall-clock minutes.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class JobRecord:
    arrival: float
    start: float
    finish: float


@dataclass(frozen=True)
class QueueWindowStats:
    lam: float
    w: float
    l: float
    n_jobs: int

    @property
    def littles_law_error(self) -> float:
        """|L - lambda*W| / max(L, 1)."""
        return abs(self.l - self.lam * self.w) / max(self.l, 1.0)


def queue_stats(records: Sequence[JobRecord], window_start: float, window_end: float) -> QueueWindowStats:
    if window_end <= window_start:
        raise ValueError("window_end must exceed window_start")
    horizon = window_end - window_start
    in_window = [r for r in records if window_start <= r.arrival < window_end]
    lam = len(in_window) / horizon
    w = float(np.mean([r.finish - r.arrival for r in in_window])) if in_window else 0.0

    # time-average of the in-system count via an event sweep clipped to the window
    events: list[tuple[float, int]] = []
    for r in records:
        a = max(r.arrival, window_start)
        f = min(r.finish, window_end)
        if f > a:
            events.append((a, +1))
            events.append((f, -1))
    events.sort()
    area = 0.0
    count = 0
    prev = window_start
    for t, delta in events:
        area += count * (t - prev)
        count += delta
        prev = t
    area += count * (window_end - prev)
    return QueueWindowStats(lam=lam, w=w, l=area / horizon, n_jobs=len(in_window))


def simulate_poisson_queue(
    arrival_rate: float,
    service_time: Callable[[np.random.Generator], float] | float,
    horizon: float,
    servers: int = 1,
    seed: int = 0,
) -> list[JobRecord]:
    """FIFO c-server station fed by Poisson arrivals; returns finished jobs.

    ``service_time`` is either a constant or a sampler drawing from the
    simulation RNG.  Jobs still in system at the horizon are completed (the
    arrival stream stops, the servers drain).
    """
    if arrival_rate <= 0 or horizon <= 0 or servers < 1:
        raise ValueError("arrival_rate, horizon and servers must be positive")
    rng = np.random.default_rng(seed)
    draw = service_time if callable(service_time) else (lambda _rng: float(service_time))

    arrivals: list[float] = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / arrival_rate)
        if t >= horizon:
            break
        arrivals.append(t)

    free_at = [0.0] * servers
    heapq.heapify(free_at)
    records: list[JobRecord] = []
    for a in arrivals:
        available = heapq.heappop(free_at)
        start = max(a, available)
        finish = start + draw(rng)
        heapq.heappush(free_at, finish)
        records.append(JobRecord(arrival=a, start=start, finish=finish))
    return records
