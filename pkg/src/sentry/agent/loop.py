"""The agent collector loop.

Sources feed a single serialized evaluator (per-source order preserved);
each event is scored against the active policy and alert-worthy events are
enriched with captured context and shipped to the gateway.  Failed sends
land in a bounded drop-oldest spool that is replayed, in order, before any
newer alert.
"""
from __future__ import annotations

import logging
import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import httpx
import psutil

from sentry.agent.events import Alert, TelemetryEvent, UtilizationSample
from sentry.agent.evidence import SyntheticScreenProvider, capture_evidence
from sentry.agent.indicators import (
    IndicatorCounters,
    NullClassifier,
    evaluate_indicators,
    risk_score,
)
from sentry.policy.model import PolicySet, ScoreConfig
from sentry.policy.sync import NO_CHANGE, SyncCounters, sync_policies

log = logging.getLogger(__name__)

SPOOL_LIMIT = 10_000


class SinkUnavailable(RuntimeError):
    pass


class AlertSink(Protocol):
    def send(self, alert: Alert) -> None: ...


class MemorySink:
    def __init__(self):
        self.alerts: list[Alert] = []

    def send(self, alert: Alert) -> None:
        self.alerts.append(alert)


class HttpAlertSink:
    """POSTs alerts to the gateway's /alert/save endpoint."""

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
        if resp.status_code != 200:
            raise SinkUnavailable(f"login -> {resp.status_code}")
        return resp.json()["token"]

    def send(self, alert: Alert) -> None:
        try:
            with httpx.Client(timeout=self.timeout) as client:
                if self._token is None:
                    self._token = self._login(client)
                resp = client.post(
                    f"{self.base_url}/api/alert/save",
                    json=alert.to_payload(),
                    headers={"Authorization": f"Bearer {self._token}"},
                )
                if resp.status_code == 401:
                    self._token = self._login(client)
                    resp = client.post(
                        f"{self.base_url}/api/alert/save",
                        json=alert.to_payload(),
                        headers={"Authorization": f"Bearer {self._token}"},
                    )
        except httpx.HTTPError as exc:
            raise SinkUnavailable(str(exc)) from exc
        if resp.status_code >= 500 or resp.status_code == 429:
            raise SinkUnavailable(f"/alert/save -> {resp.status_code}")
        if resp.status_code not in (200, 201):
            # validation rejections are not retryable; log and drop
            log.error("alert %s rejected: %s %s", alert.id, resp.status_code, resp.text[:200])


class AlertSpool:
    """Bounded FIFO of undelivered alerts; overflow drops the oldest."""

    def __init__(self, limit: int = SPOOL_LIMIT):
        self.limit = limit
        self._items: list[Alert] = []
        self.dropped = 0

    def __len__(self) -> int:
        return len(self._items)

    def append(self, alert: Alert) -> None:
        self._items.append(alert)
        while len(self._items) > self.limit:
            self._items.pop(0)
            self.dropped += 1

    def drain(self) -> list[Alert]:
        items, self._items = self._items, []
        return items

    def requeue_front(self, alerts: list[Alert]) -> None:
        self._items = alerts + self._items


@dataclass
class AgentHealth:
    events_seen: int = 0
    alerts_emitted: int = 0
    alerts_delivered: int = 0
    processes_terminated: int = 0
    sync: SyncCounters = field(default_factory=SyncCounters)
    indicators: IndicatorCounters = field(default_factory=IndicatorCounters)
    spool_dropped: int = 0
    spool_pending: int = 0

    def as_dict(self) -> dict:
        return {
            "events_seen": self.events_seen,
            "alerts_emitted": self.alerts_emitted,
            "alerts_delivered": self.alerts_delivered,
            "processes_terminated": self.processes_terminated,
            "policy_syncs": self.sync.syncs,
            "policy_fetch_errors": self.sync.fetch_errors,
            "policy_auth_failures": self.sync.auth_failures,
            "classifier_unavailable": self.indicators.classifier_unavailable,
            "spool_dropped": self.spool_dropped,
            "spool_pending": self.spool_pending,
        }


@dataclass(frozen=True)
class AuditRecord:
    kind: str
    detail: str
    source_id: str
    at: float


class AgentRunner:
    """Wires sources, policy sync, scoring, capture, and delivery together."""

    def __init__(
        self,
        sources: list,
        sink: AlertSink,
        cfg: ScoreConfig | None = None,
        policy_fetcher=None,
        policy: PolicySet | None = None,
        classifier=None,
        seed: int = 0,
        site_match_mode: str = "suffix",
        screen_provider=None,
        spool_limit: int = SPOOL_LIMIT,
        terminate_processes: bool = False,
        policy_cache_path=None,
    ):
        if not sources:
            raise ValueError("at least one telemetry source required")
        from pathlib import Path

        self.sources = sources
        self.sink = sink
        self.cfg = cfg or ScoreConfig.default()
        self.policy_fetcher = policy_fetcher
        self.policy_cache_path = Path(policy_cache_path) if policy_cache_path else None
        policy_cache_path = self.policy_cache_path
        if policy is None and policy_cache_path is not None:
            # stale local copy beats an empty policy when the gateway is down
            from sentry.policy.sync import load_policy_file

            policy = load_policy_file(policy_cache_path)
        self.policy = policy or PolicySet()
        self.classifier = classifier or NullClassifier()
        self.seed = seed
        self.site_match_mode = site_match_mode
        self.screen_provider = screen_provider or SyntheticScreenProvider(seed)
        self.spool = AlertSpool(spool_limit)
        self.health = AgentHealth()
        self.audit_records: list[AuditRecord] = []
        self.utilization: list[UtilizationSample] = []
        self.terminate_processes = terminate_processes  # audit-record simulation only
        self._alert_seq = 0
        self._last_sync = float("-inf")
        self._last_processes: dict[str, tuple[str, ...]] = {}
        self._policy_lock = threading.Lock()

    # -- policy ---------------------------------------------------------

    def _refresh_policy(self, now: float) -> None:
        if self.policy_fetcher is None:
            return
        result = sync_policies(
            self.policy_fetcher,
            last_version=self.policy.version,
            now=now,
            last_sync=self._last_sync,
            delta=self.cfg.update_interval,
            cached=self.policy,
            counters=self.health.sync,
        )
        if result is not NO_CHANGE:
            self._last_sync = now
            with self._policy_lock:
                changed = result.version != self.policy.version
                self.policy = result
            if self.policy_cache_path is not None and changed:
                from sentry.policy.sync import save_policy_file

                try:
                    save_policy_file(result, self.policy_cache_path)
                except OSError as exc:
                    log.warning("could not persist policy cache: %s", exc)

    # -- alert path -----------------------------------------------------

    def _next_alert_id(self) -> str:
        self._alert_seq += 1
        return f"{self.seed:08x}-{self._alert_seq:06d}"

    def _build_alert(self, event: TelemetryEvent, indicators, score: float, t_res: float) -> Alert:
        reasons = [
            name
            for name, flag in zip(("dns", "kw", "proc", "port", "hs"), indicators.as_tuple())
            if flag
        ]
        capture = capture_evidence(
            source_id=event.source_id,
            screen_provider=self.screen_provider,
            process_provider=lambda: self._last_processes.get(event.source_id, ()),
            mac_provider=lambda: event.mac,
        )
        reason = "+".join(reasons) or "manual"
        if capture.evidence_missing:
            reason += " (evidence unavailable)"
        stats = capture.stats
        return Alert(
            id=self._next_alert_id(),
            pc_id=event.source_id,
            mac=event.mac,
            at=event.at,
            reason=reason,
            indicators=indicators,
            score=score,
            processes=capture.processes,
            screen_evidence=capture.screen,
            policy_version=self.policy.version,
            stats=stats.__class__.from_parts(
                stats.t_proc, stats.t_screen, stats.t_telemetry, stats.delta_sync, t_res=t_res
            ),
        )

    def _deliver(self, alert: Alert) -> None:
        pending = self.spool.drain()
        pending.append(alert)
        for i, item in enumerate(pending):
            t0 = time.perf_counter()
            try:
                self.sink.send(item)
            except SinkUnavailable:
                self.spool.requeue_front(pending[i:])
                self.health.spool_dropped = self.spool.dropped
                self.health.spool_pending = len(self.spool)
                return
            self._record_latency(item, time.perf_counter() - t0)
            self.health.alerts_delivered += 1
        self.health.spool_pending = len(self.spool)

    def _record_latency(self, alert: Alert, l_net: float) -> None:
        if alert.stats is None:
            return
        s = alert.stats
        object.__setattr__(s, "l_net", l_net)
        object.__setattr__(s, "l_total", s.l_cap + l_net + s.t_res)

    # -- main loop ------------------------------------------------------

    def process_event(self, event: TelemetryEvent, now: float | None = None) -> Alert | None:
        now = time.monotonic() if now is None else now
        self._refresh_policy(now)
        self.health.events_seen += 1
        if event.kind == "process_snapshot":
            self._last_processes[event.source_id] = tuple(event.payload)

        t0 = time.perf_counter()
        indicators = evaluate_indicators(
            event,
            self.policy,
            classify=self.classifier,
            site_match_mode=self.site_match_mode,
            counters=self.health.indicators,
        )
        t_res = time.perf_counter() - t0 if event.kind == "typed_phrase" else 0.0

        if indicators.x_proc:
            for name in event.payload:
                if str(name).casefold() in self.policy.malicious_processes:
                    self.audit_records.append(
                        AuditRecord(
                            kind="process_terminated",
                            detail=str(name),
                            source_id=event.source_id,
                            at=event.at,
                        )
                    )
                    self.health.processes_terminated += 1

        score = risk_score(indicators, self.cfg)
        if score < self.cfg.threshold:
            return None
        alert = self._build_alert(event, indicators, score, t_res)
        self.health.alerts_emitted += 1
        self._deliver(alert)
        return alert

    def run(self, stop_event: threading.Event | None = None) -> AgentHealth:
        """Process events until every source is exhausted or stop is set."""
        stop = stop_event or threading.Event()
        if len(self.sources) == 1:
            for event in self.sources[0].events():
                if stop.is_set():
                    break
                self.process_event(event)
        else:
            channel: queue.Queue = queue.Queue(maxsize=1024)
            done = object()

            def pump(source):
                try:
                    for ev in source.events():
                        if stop.is_set():
                            break
                        channel.put(ev)
                finally:
                    channel.put(done)

            threads = [
                threading.Thread(target=pump, args=(s,), daemon=True) for s in self.sources
            ]
            for t in threads:
                t.start()
            finished = 0
            while finished < len(self.sources) and not stop.is_set():
                item = channel.get()
                if item is done:
                    finished += 1
                    continue
                self.process_event(item)
        self.health.spool_pending = len(self.spool)
        return self.health

    def sample_utilization(self, at: float | None = None) -> None:
        proc = psutil.Process()
        at = time.monotonic() if at is None else at
        cpu = min(proc.cpu_percent(interval=None) / 100.0, 1.0)
        mem = min(proc.memory_percent() / 100.0, 1.0)
        self.utilization.append(UtilizationSample(u=cpu, at=at, resource="cpu"))
        self.utilization.append(UtilizationSample(u=mem, at=at + 1e-9, resource="memory"))


def write_replay_file(path, events: Iterable[TelemetryEvent]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(ev.to_line() + "\n")
