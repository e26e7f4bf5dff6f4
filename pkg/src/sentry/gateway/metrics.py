"""Line-oriented metrics exposition (name value per line)."""
from __future__ import annotations

import threading
from collections import deque

import psutil

from sentry.analytics.loadtest import nearest_rank


class MetricsCollector:
    def __init__(self, window: int = 5000):
        self._lock = threading.Lock()
        self._latencies: deque[float] = deque(maxlen=window)
        self.requests_total = 0

    def record_request(self, duration_s: float) -> None:
        with self._lock:
            self.requests_total += 1
            self._latencies.append(duration_s * 1000.0)

    def latency_summary(self) -> dict[str, float]:
        with self._lock:
            samples = sorted(self._latencies)
        if not samples:
            return {"mean_ms": 0.0, "p90_ms": 0.0, "p95_ms": 0.0}
        return {
            "mean_ms": sum(samples) / len(samples),
            "p90_ms": nearest_rank(samples, 90),
            "p95_ms": nearest_rank(samples, 95),
        }


def render_metrics(collector: MetricsCollector, cache_stats, queue, extra: dict | None = None) -> str:
    lat = collector.latency_summary()
    qstats = queue.stats() if queue else None
    proc = psutil.Process()
    lines = [
        f"requests_total {collector.requests_total}",
        f"request_latency_mean_ms {lat['mean_ms']:.4f}",
        f"request_latency_p90_ms {lat['p90_ms']:.4f}",
        f"request_latency_p95_ms {lat['p95_ms']:.4f}",
        f"cache_hits {cache_stats.n_hit}",
        f"cache_misses {cache_stats.n_miss}",
        f"cache_hit_ratio {cache_stats.hit_ratio if cache_stats.hit_ratio is not None else 0:.6f}",
        f"cache_t_cache_mean_ms {cache_stats.t_cache_mean * 1000:.4f}",
        f"cache_t_db_mean_ms {cache_stats.t_db_mean * 1000:.4f}",
    ]
    if qstats is not None:
        lines += [
            f"queue_lambda {qstats.lam:.6f}",
            f"queue_w_seconds {qstats.w:.6f}",
            f"queue_l {qstats.l:.6f}",
            f"queue_depth {queue.depth()}",
            f"queue_completed {queue.completed}",
            f"queue_dead_letters {len(queue.dead_letters)}",
        ]
    lines += [
        f"process_cpu_percent {proc.cpu_percent(interval=None):.4f}",
        f"process_rss_mb {proc.memory_info().rss / (1024 * 1024):.4f}",
        f"tasks {threading.active_count()}",
    ]
    for name, value in (extra or {}).items():
        lines.append(f"{name} {value}")
    return "\n".join(lines) + "\n"
