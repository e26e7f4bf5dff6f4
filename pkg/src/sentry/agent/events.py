"""Event and alert payload types flowing through the agent."""
from __future__ import annotations

import base64
import json
import re
from dataclasses import dataclass, field
from typing import Any

from sentry.policy.model import INDICATOR_KEYS

EVENT_KINDS = ("dns_query", "typed_phrase", "process_snapshot", "port_banner")

_MAC_RE = re.compile(r"^[0-9A-Fa-f]{2}(:[0-9A-Fa-f]{2}){5}$")


def valid_mac(mac: str) -> bool:
    return bool(_MAC_RE.match(mac))


@dataclass(frozen=True)
class TelemetryEvent:
    kind: str
    payload: Any
    source_id: str
    mac: str
    at: float

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if not valid_mac(self.mac):
            raise ValueError(f"bad MAC address {self.mac!r}")
        if self.kind in ("dns_query", "typed_phrase"):
            if not isinstance(self.payload, str) or not self.payload:
                raise ValueError(f"{self.kind} payload must be a non-empty string")
        elif self.kind == "process_snapshot":
            if not isinstance(self.payload, (list, tuple)) or not self.payload:
                raise ValueError("process_snapshot payload must be a non-empty list")
            object.__setattr__(self, "payload", tuple(str(p) for p in self.payload))
        else:  # port_banner
            if (
                not isinstance(self.payload, dict)
                or "port" not in self.payload
                or "banner" not in self.payload
            ):
                raise ValueError("port_banner payload must carry port and banner")

    def to_line(self) -> str:
        payload = list(self.payload) if isinstance(self.payload, tuple) else self.payload
        doc = {
            "kind": self.kind,
            "payload": payload,
            "source_id": self.source_id,
            "mac": self.mac,
            "at": self.at,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "TelemetryEvent":
        doc = json.loads(line)
        return cls(
            kind=doc["kind"],
            payload=doc["payload"],
            source_id=doc["source_id"],
            mac=doc["mac"],
            at=float(doc["at"]),
        )


@dataclass(frozen=True)
class IndicatorVector:
    x_dns: int = 0
    x_kw: int = 0
    x_proc: int = 0
    x_port: int = 0
    x_hs: int = 0
    at: float = 0.0

    def __post_init__(self):
        for name in ("x_dns", "x_kw", "x_proc", "x_port", "x_hs"):
            v = getattr(self, name)
            if v not in (0, 1):
                raise ValueError(f"{name}={v!r} must be 0 or 1")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.x_dns, self.x_kw, self.x_proc, self.x_port, self.x_hs)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(INDICATOR_KEYS, self.as_tuple()))

    @classmethod
    def from_dict(cls, d: dict[str, int], at: float = 0.0) -> "IndicatorVector":
        return cls(
            x_dns=int(d.get("dns", 0)),
            x_kw=int(d.get("kw", 0)),
            x_proc=int(d.get("proc", 0)),
            x_port=int(d.get("port", 0)),
            x_hs=int(d.get("hs", 0)),
            at=at,
        )


@dataclass(frozen=True)
class AgentLatencyStats:
    """Capture/transport timings for one alert, all in seconds."""

    t_proc: float
    t_screen: float
    t_telemetry: float
    delta_sync: float
    l_cap: float
    l_net: float = 0.0
    t_res: float = 0.0
    l_total: float = 0.0

    @classmethod
    def from_parts(
        cls,
        t_proc: float,
        t_screen: float,
        t_telemetry: float,
        delta_sync: float,
        l_net: float = 0.0,
        t_res: float = 0.0,
    ) -> "AgentLatencyStats":
        l_cap = max(t_proc, t_screen, t_telemetry) + delta_sync
        return cls(
            t_proc=t_proc,
            t_screen=t_screen,
            t_telemetry=t_telemetry,
            delta_sync=delta_sync,
            l_cap=l_cap,
            l_net=l_net,
            t_res=t_res,
            l_total=l_cap + l_net + t_res,
        )


@dataclass(frozen=True)
class UtilizationSample:
    u: float
    at: float
    resource: str = "cpu"

    def __post_init__(self):
        if not 0.0 <= self.u <= 1.0:
            raise ValueError(f"utilization {self.u} outside [0, 1]")
        if self.resource not in ("cpu", "memory", "network"):
            raise ValueError(f"unknown resource {self.resource!r}")


@dataclass(frozen=True)
class Alert:
    id: str
    pc_id: str
    mac: str
    at: float
    reason: str
    indicators: IndicatorVector
    score: float
    processes: tuple[str, ...] = ()
    screen_evidence: bytes = b""
    policy_version: int = 0
    stats: AgentLatencyStats | None = field(default=None, compare=False)

    def to_payload(self) -> dict:
        """Gateway /alert/save body; evidence travels base64-encoded."""
        return {
            "id": self.id,
            "pcId": self.pc_id,
            "mac": self.mac,
            "register_date": self.at,
            "reason": self.reason,
            "indicators": self.indicators.as_dict(),
            "score": self.score,
            "process": list(self.processes),
            "image": {"content": base64.b64encode(self.screen_evidence).decode("ascii")},
            "policy_version": self.policy_version,
        }

    def payload_bytes(self) -> bytes:
        return json.dumps(self.to_payload(), sort_keys=True).encode("utf-8")
