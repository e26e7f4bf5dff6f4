"""TTL response cache with hit-ratio bookkeeping.

Entries expire a fixed interval after insertion and are additionally
invalidated on any mutation of the backing collection (write-through
invalidation, stricter than TTL alone).  The stats feed the expected
latency model  E[T] = H * T_cache + (1-H) * T_db.

``hit_delay`` emulates the cache tier's service time at desk scale (a
remote cache hop); it defaults to zero and only calibration tests set it.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass


@dataclass
class CacheStats:
    n_hit: int = 0
    n_miss: int = 0
    t_cache_total: float = 0.0
    t_db_total: float = 0.0

    @property
    def hit_ratio(self) -> float | None:
        total = self.n_hit + self.n_miss
        return self.n_hit / total if total else None

    @property
    def t_cache_mean(self) -> float:
        return self.t_cache_total / self.n_hit if self.n_hit else 0.0

    @property
    def t_db_mean(self) -> float:
        return self.t_db_total / self.n_miss if self.n_miss else 0.0

    def expected_latency(self) -> float | None:
        """H * T_cache + (1-H) * T_db from the observed means."""
        h = self.hit_ratio
        if h is None:
            return None
        return h * self.t_cache_mean + (1.0 - h) * self.t_db_mean

    def as_dict(self) -> dict:
        return {
            "n_hit": self.n_hit,
            "n_miss": self.n_miss,
            "hit_ratio": self.hit_ratio,
            "t_cache_mean": self.t_cache_mean,
            "t_db_mean": self.t_db_mean,
            "expected_latency": self.expected_latency(),
        }


@dataclass
class _Entry:
    value: object
    inserted_at: float


class TtlCache:
    def __init__(
        self,
        ttl_seconds: float = 20.0,
        clock=time.monotonic,
        hit_delay: float = 0.0,
        perf_clock=time.perf_counter,
    ):
        if ttl_seconds <= 0:
            raise ValueError("ttl_seconds must be positive")
        self.ttl = ttl_seconds
        self.clock = clock
        self.hit_delay = hit_delay
        self.perf_clock = perf_clock
        self.stats = CacheStats()
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}

    def _fresh(self, entry: _Entry, now: float) -> bool:
        # strict: an entry is never served at or past inserted_at + ttl
        return now - entry.inserted_at < self.ttl

    def cached_get(self, key: str, loader):
        """Serve from cache while fresh, else invoke the loader and store."""
        now = self.clock()
        hit_value = None
        hit = False
        with self._lock:
            entry = self._entries.get(key)
            if entry is not None:
                if self._fresh(entry, now):
                    hit = True
                    hit_value = entry.value
                else:
                    del self._entries[key]
        if hit:
            t0 = self.perf_clock()
            if self.hit_delay:
                time.sleep(self.hit_delay)
            elapsed = self.perf_clock() - t0
            with self._lock:
                self.stats.n_hit += 1
                self.stats.t_cache_total += elapsed
            return hit_value
        t0 = self.perf_clock()
        try:
            value = loader()
        finally:
            # a failed load is still a miss: n_hit + n_miss tracks invocations
            elapsed = self.perf_clock() - t0
            with self._lock:
                self.stats.n_miss += 1
                self.stats.t_db_total += elapsed
        with self._lock:
            self._entries[key] = _Entry(value=value, inserted_at=self.clock())
        return value

    def peek(self, key: str):
        """Fresh cached value or None; counts nothing."""
        with self._lock:
            entry = self._entries.get(key)
            if entry is not None and self._fresh(entry, self.clock()):
                return entry.value
            return None

    def invalidate_prefix(self, prefix: str) -> int:
        with self._lock:
            doomed = [k for k in self._entries if k.startswith(prefix)]
            for k in doomed:
                del self._entries[k]
            return len(doomed)

    def invalidate_all(self) -> None:
        with self._lock:
            self._entries.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
