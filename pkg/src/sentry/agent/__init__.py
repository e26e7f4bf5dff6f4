"""Endpoint monitoring agent: telemetry sources, indicator evaluation,
evidence capture, and alert shipping."""

from sentry.agent.events import (
    Alert,
    AgentLatencyStats,
    IndicatorVector,
    TelemetryEvent,
    UtilizationSample,
)
from sentry.agent.indicators import (
    ClassifierUnavailable,
    EmptyWindow,
    HttpClassifier,
    NullClassifier,
    average_utilization,
    decide_or,
    evaluate_indicators,
    risk_score,
)
from sentry.agent.evidence import EvidenceUnavailable, SyntheticScreenProvider, capture_evidence
from sentry.agent.loop import AgentRunner, AgentHealth, AlertSpool, HttpAlertSink, MemorySink, SinkUnavailable
from sentry.agent.sources import MalformedReplay, ReplaySource, SocketSource, SyntheticSource

__all__ = [
    "Alert",
    "AgentLatencyStats",
    "IndicatorVector",
    "TelemetryEvent",
    "UtilizationSample",
    "ClassifierUnavailable",
    "EmptyWindow",
    "HttpClassifier",
    "NullClassifier",
    "average_utilization",
    "decide_or",
    "evaluate_indicators",
    "risk_score",
    "EvidenceUnavailable",
    "SyntheticScreenProvider",
    "capture_evidence",
    "AgentRunner",
    "AgentHealth",
    "AlertSpool",
    "HttpAlertSink",
    "MemorySink",
    "SinkUnavailable",
    "MalformedReplay",
    "ReplaySource",
    "SocketSource",
    "SyntheticSource",
]
