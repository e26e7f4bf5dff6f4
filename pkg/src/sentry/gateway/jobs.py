"""In-process async job queue.

FIFO per queue, bounded capacity, at-least-once execution with bounded
retries and a dead-letter list.  Per-job arrival/start/finish timestamps
feed the Little's-law estimators (lambda, W, L) over a rolling window.
A broker adapter can replace this class behind the same surface.
"""
from __future__ import annotations

import logging
import queue
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from sentry.analytics.queueing import JobRecord, QueueWindowStats, queue_stats

log = logging.getLogger(__name__)

JobQueueStats = QueueWindowStats


class QueueFull(RuntimeError):
    pass


@dataclass
class Job:
    id: int
    kind: str
    payload: dict
    arrival: float
    attempts: int = 0
    start: float | None = None
    finish: float | None = None
    error: str | None = None


@dataclass
class DeadLetter:
    job_id: int
    kind: str
    payload: dict
    error: str
    attempts: int
    at: float = field(default_factory=time.time)


class JobQueue:
    def __init__(
        self,
        handler: Callable[[str, dict], None],
        capacity: int = 100,
        workers: int = 2,
        max_retries: int = 3,
        clock=time.monotonic,
        record_limit: int = 10_000,
    ):
        if capacity < 1 or workers < 1:
            raise ValueError("capacity and workers must be >= 1")
        self.handler = handler
        self.capacity = capacity
        self.max_retries = max_retries
        self.clock = clock
        self._queue: queue.Queue[Job | None] = queue.Queue(maxsize=capacity)
        self._workers = [
            threading.Thread(target=self._work, name=f"job-worker-{i}", daemon=True)
            for i in range(workers)
        ]
        self._started = False
        self._seq = 0
        self._lock = threading.Lock()
        self._records: deque[JobRecord] = deque(maxlen=record_limit)
        self.dead_letters: list[DeadLetter] = []
        self.completed = 0
        self.failed = 0

    # -- lifecycle -------------------------------------------------------

    def start(self) -> None:
        if not self._started:
            self._started = True
            for w in self._workers:
                w.start()

    def stop(self, drain: bool = True) -> None:
        if not self._started:
            return
        if drain:
            self._queue.join()
        for _ in self._workers:
            self._queue.put(None)
        for w in self._workers:
            w.join(timeout=5)
        self._started = False

    # -- producer ----------------------------------------------------------

    def is_full(self) -> bool:
        return self._queue.full()

    def depth(self) -> int:
        return self._queue.qsize()

    def enqueue(self, kind: str, payload: dict) -> int:
        with self._lock:
            self._seq += 1
            job = Job(id=self._seq, kind=kind, payload=dict(payload), arrival=self.clock())
        try:
            self._queue.put_nowait(job)
        except queue.Full as exc:
            raise QueueFull(f"queue at capacity {self.capacity}") from exc
        return job.id

    # -- workers -----------------------------------------------------------

    def _work(self) -> None:
        while True:
            job = self._queue.get()
            if job is None:
                self._queue.task_done()
                return
            job.start = self.clock() if job.start is None else job.start
            job.attempts += 1
            try:
                self.handler(job.kind, job.payload)
            except Exception as exc:
                job.error = str(exc)
                if job.attempts <= self.max_retries:
                    log.warning("job %s failed (attempt %d): %s", job.id, job.attempts, exc)
                    self._queue.put(job)  # retry at the tail, FIFO preserved for new work
                else:
                    self.failed += 1
                    with self._lock:
                        self.dead_letters.append(
                            DeadLetter(
                                job_id=job.id,
                                kind=job.kind,
                                payload=job.payload,
                                error=str(exc),
                                attempts=job.attempts,
                            )
                        )
            else:
                job.finish = self.clock()
                self.completed += 1
                with self._lock:
                    self._records.append(
                        JobRecord(arrival=job.arrival, start=job.start, finish=job.finish)
                    )
            finally:
                self._queue.task_done()

    # -- stats ---------------------------------------------------------------

    def stats(self, window_seconds: float = 60.0) -> JobQueueStats:
        now = self.clock()
        with self._lock:
            records = list(self._records)
        return queue_stats(records, window_start=now - window_seconds, window_end=now)
