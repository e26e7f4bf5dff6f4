from __future__ import annotations

import threading
import time

import pytest

from sentry.analytics.queueing import JobRecord, queue_stats, simulate_poisson_queue
from sentry.gateway.jobs import JobQueue, QueueFull


class TestQueueStats:
    def test_hand_computed_tiny_case(self):
        # two jobs: in system [0,2) and [1,2) -> integral = 1*1 + 2*1 = 3 over T=4
        records = [
            JobRecord(arrival=0.0, start=0.0, finish=2.0),
            JobRecord(arrival=1.0, start=1.0, finish=2.0),
        ]
        stats = queue_stats(records, 0.0, 4.0)
        assert stats.lam == pytest.approx(0.5)
        assert stats.w == pytest.approx(1.5)
        assert stats.l == pytest.approx(0.75)

    def test_idle_window(self):
        stats = queue_stats([], 0.0, 60.0)
        assert stats.lam == 0.0 and stats.w == 0.0 and stats.l == 0.0

    def test_littles_law_on_deterministic_poisson(self):
        # lambda=10/s, deterministic 2 s service, many servers: W = 2 exactly,
        # L must settle near lambda*W = 20
        records = simulate_poisson_queue(10.0, 2.0, horizon=80.0, servers=400, seed=42)
        stats = queue_stats(records, 10.0, 70.0)
        assert stats.w == pytest.approx(2.0, abs=1e-9)
        assert stats.l == pytest.approx(20.0, rel=0.10)
        assert stats.littles_law_error <= 0.10

    def test_littles_law_on_contended_single_server(self):
        # M/D/1 at rho=0.5: the measured identity holds regardless of waiting
        records = simulate_poisson_queue(10.0, 0.05, horizon=120.0, servers=1, seed=7)
        stats = queue_stats(records, 20.0, 100.0)
        assert stats.littles_law_error <= 0.10

    def test_window_validation(self):
        with pytest.raises(ValueError):
            queue_stats([], 10.0, 10.0)

    def test_simulation_determinism(self):
        a = simulate_poisson_queue(5.0, 0.1, horizon=20.0, seed=3)
        b = simulate_poisson_queue(5.0, 0.1, horizon=20.0, seed=3)
        assert a == b


class TestJobQueue:
    def test_fifo_processing(self):
        seen = []
        q = JobQueue(handler=lambda kind, p: seen.append(p["n"]), capacity=50, workers=1)
        q.start()
        for n in range(10):
            q.enqueue("job", {"n": n})
        q.stop()
        assert seen == list(range(10))

    def test_capacity_overflow_raises(self):
        q = JobQueue(handler=lambda k, p: None, capacity=3, workers=1)
        # workers not started: nothing drains
        for n in range(3):
            q.enqueue("job", {"n": n})
        with pytest.raises(QueueFull):
            q.enqueue("job", {"n": 99})

    def test_retries_then_dead_letter(self):
        attempts = []

        def flaky(kind, payload):
            attempts.append(payload["n"])
            raise RuntimeError("always fails")

        q = JobQueue(handler=flaky, capacity=10, workers=1, max_retries=2)
        q.start()
        q.enqueue("job", {"n": 1})
        deadline = time.time() + 5
        while not q.dead_letters and time.time() < deadline:
            time.sleep(0.01)
        q.stop(drain=False)
        assert len(attempts) == 3  # first try + 2 retries
        assert len(q.dead_letters) == 1
        assert q.dead_letters[0].error == "always fails"

    def test_transient_failure_recovers(self):
        calls = {"n": 0}

        def once_flaky(kind, payload):
            calls["n"] += 1
            if calls["n"] == 1:
                raise RuntimeError("transient")

        q = JobQueue(handler=once_flaky, capacity=10, workers=1, max_retries=3)
        q.start()
        q.enqueue("job", {})
        q.stop()
        assert q.completed == 1
        assert not q.dead_letters

    def test_stats_reflect_throughput(self):
        q = JobQueue(handler=lambda k, p: time.sleep(0.002), capacity=200, workers=4)
        q.start()
        for n in range(100):
            q.enqueue("job", {"n": n})
        q.stop()
        stats = q.stats(window_seconds=60.0)
        assert stats.n_jobs == 100
        assert stats.lam > 0 and stats.w > 0 and stats.l > 0
        # measurement identity on the full window (all jobs inside it)
        assert stats.littles_law_error <= 0.15

    def test_concurrent_enqueue_thread_safety(self):
        q = JobQueue(handler=lambda k, p: None, capacity=1000, workers=2)
        q.start()

        def producer():
            for _ in range(100):
                q.enqueue("job", {})

        threads = [threading.Thread(target=producer) for _ in range(5)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        q.stop()
        assert q.completed == 500
