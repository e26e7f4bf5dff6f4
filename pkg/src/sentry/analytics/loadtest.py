"""Closed-loop HTTP load harness.

Drives the gateway with the production request mix (authentication, image
registration, alert registration) at ascending concurrency levels and
reports mean/std/p90/p95 latency plus resource gauges per level.  The
per-level latencies feed ``fit_linear`` for the scalability projection.
"""
from __future__ import annotations

import base64
import math
import threading
import time
from dataclasses import dataclass, field

import httpx
import psutil

from sentry.analytics.regression import RegressionFit, fit_linear


class TargetDown(RuntimeError):
    """Target service unreachable before or during the run."""


def nearest_rank(sorted_values: list[float], percentile: float) -> float:
    """Nearest-rank percentile: value at ceil(p/100 * n), 1-indexed."""
    if not sorted_values:
        raise ValueError("no samples")
    k = max(1, math.ceil(percentile / 100.0 * len(sorted_values)))
    return sorted_values[k - 1]


@dataclass
class LevelResult:
    concurrency: int
    n_requests: int
    n_errors: int
    mean_ms: float
    std_ms: float
    p90_ms: float
    p95_ms: float
    cpu_percent: float
    rss_mb: float
    tasks: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LoadTestReport:
    target: str
    mix: list[str]
    levels: list[LevelResult] = field(default_factory=list)
    partial: bool = False

    def latency_fit(self) -> RegressionFit:
        return fit_linear(
            [lv.concurrency for lv in self.levels],
            [lv.mean_ms for lv in self.levels],
        )

    def as_dict(self) -> dict:
        out = {
            "target": self.target,
            "mix": self.mix,
            "partial": self.partial,
            "levels": [lv.as_dict() for lv in self.levels],
        }
        if len(self.levels) >= 2:
            out["latency_fit"] = self.latency_fit().as_dict()
        return out

    def as_csv(self) -> str:
        header = "concurrency,n_requests,n_errors,mean_ms,std_ms,p90_ms,p95_ms,cpu_percent,rss_mb,tasks"
        rows = [header]
        for lv in self.levels:
            rows.append(
                f"{lv.concurrency},{lv.n_requests},{lv.n_errors},{lv.mean_ms:.3f},{lv.std_ms:.3f},"
                f"{lv.p90_ms:.3f},{lv.p95_ms:.3f},{lv.cpu_percent:.2f},{lv.rss_mb:.2f},{lv.tasks}"
            )
        return "\n".join(rows) + "\n"


_TINY_PNG_B64 = base64.b64encode(b"\x89PNG\r\n\x1a\n" + b"0" * 64).decode()


class RequestMix:
    """Builds the three request kinds against a live gateway."""

    def __init__(self, base_url: str, email: str, password: str):
        self.base_url = base_url.rstrip("/")
        self.email = email
        self.password = password
        self.token: str | None = None

    def ensure_account(self, client: httpx.Client) -> None:
        client.post(
            f"{self.base_url}/api/user",
            json={"email": self.email, "password": self.password, "role": "user"},
        )
        resp = client.post(
            f"{self.base_url}/api/login",
            json={"email": self.email, "password": self.password},
        )
        if resp.status_code != 200:
            raise TargetDown(f"login failed: {resp.status_code}")
        self.token = resp.json()["token"]

    def _headers(self) -> dict:
        return {"Authorization": f"Bearer {self.token}"}

    def fire(self, client: httpx.Client, kind: str, i: int) -> int:
        if kind == "auth":
            r = client.post(
                f"{self.base_url}/api/login",
                json={"email": self.email, "password": self.password},
            )
        elif kind == "image":
            r = client.post(
                f"{self.base_url}/api/image",
                json={"content": _TINY_PNG_B64},
                headers=self._headers(),
            )
        elif kind == "alert":
            r = client.post(
                f"{self.base_url}/api/alert/save",
                json={
                    "pcId": f"bench-{i % 8}",
                    "mac": "AA:BB:CC:00:11:22",
                    "process": "benchproc",
                    "register_date": "2022-10-25",
                    "reason": "bench",
                    "score": 1.0,
                    "indicators": {"dns": 1, "kw": 0, "proc": 0, "port": 0, "hs": 0},
                },
                headers=self._headers(),
            )
        else:
            raise ValueError(f"unknown mix entry {kind!r}")
        return r.status_code


def loadtest(
    target: str,
    levels: list[int],
    mix: list[str],
    rounds_per_worker: int = 5,
    email: str = "bench@example.com",
    password: str = "bench-password-1",
    timeout: float = 30.0,
) -> LoadTestReport:
    """Run the closed loop at each concurrency level, ascending.

    Raises TargetDown if the target never answers; mid-run failure of a
    whole level aborts with ``partial=True`` and the levels finished so far.
    """
    if levels != sorted(levels):
        raise ValueError("levels must be ascending")
    report = LoadTestReport(target=target, mix=list(mix))
    mixer = RequestMix(target, email, password)
    proc = psutil.Process()
    with httpx.Client(timeout=timeout) as probe:
        try:
            mixer.ensure_account(probe)
        except (httpx.HTTPError, TargetDown) as exc:
            raise TargetDown(f"target {target} unreachable: {exc}") from exc

    for level in levels:
        latencies: list[float] = []
        errors = [0]
        lock = threading.Lock()

        def worker(worker_id: int) -> None:
            local: list[float] = []
            local_errors = 0
            with httpx.Client(timeout=timeout) as client:
                for r in range(rounds_per_worker):
                    kind = mix[(worker_id + r) % len(mix)]
                    t0 = time.perf_counter()
                    try:
                        status = mixer.fire(client, kind, worker_id)
                        ok = status < 500
                    except httpx.HTTPError:
                        ok = False
                    dt = (time.perf_counter() - t0) * 1000.0
                    if ok:
                        local.append(dt)
                    else:
                        local_errors += 1
            with lock:
                latencies.extend(local)
                errors[0] += local_errors

        proc.cpu_percent(interval=None)  # prime the counter
        threads = [threading.Thread(target=worker, args=(w,)) for w in range(level)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        cpu = proc.cpu_percent(interval=None)
        rss_mb = proc.memory_info().rss / (1024 * 1024)

        if not latencies:
            report.partial = True
            return report
        ordered = sorted(latencies)
        mean = sum(ordered) / len(ordered)
        var = sum((x - mean) ** 2 for x in ordered) / len(ordered)
        report.levels.append(
            LevelResult(
                concurrency=level,
                n_requests=len(ordered) + errors[0],
                n_errors=errors[0],
                mean_ms=mean,
                std_ms=math.sqrt(var),
                p90_ms=nearest_rank(ordered, 90),
                p95_ms=nearest_rank(ordered, 95),
                cpu_percent=cpu,
                rss_mb=rss_mb,
                tasks=threading.active_count(),
            )
        )
    return report
