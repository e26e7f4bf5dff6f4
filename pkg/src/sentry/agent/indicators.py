"""Indicator evaluation and risk scoring.

Each telemetry event is reduced to five binary signals (blocked DNS,
prohibited keyword, flagged process, vulnerable banner, hateful phrase);
the weighted sum against the threshold decides alerting.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Protocol, Sequence

import httpx

from sentry.agent.events import IndicatorVector, TelemetryEvent, UtilizationSample
from sentry.policy.model import PolicySet, ScoreConfig, parse_banner_entry


class ClassifierUnavailable(RuntimeError):
    """Prediction service unreachable; hate-speech signal degrades to 0."""


class EmptyWindow(ValueError):
    """average_utilization needs at least one sample."""


class TextClassifierHandle(Protocol):
    def classify(self, text: str) -> bool: ...


class NullClassifier:
    """Stands in when no prediction service is configured."""

    def classify(self, text: str) -> bool:
        return False


class HttpClassifier:
    """Calls the prediction service's /predict contract."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def classify(self, text: str) -> bool:
        try:
            resp = httpx.post(
                f"{self.base_url}/predict", json={"phrase": text}, timeout=self.timeout
            )
        except httpx.HTTPError as exc:
            raise ClassifierUnavailable(str(exc)) from exc
        if resp.status_code != 200:
            raise ClassifierUnavailable(f"/predict -> {resp.status_code}")
        results = resp.json()
        return bool(results and results[0]["classification"] == 1)


@dataclass
class IndicatorCounters:
    classifier_unavailable: int = 0


def _fold(text: str) -> str:
    """Casefold and strip diacritics for keyword matching."""
    decomposed = unicodedata.normalize("NFKD", text.casefold())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    word: list[str] = []
    for ch in text:
        if ch.isalnum():
            word.append(ch)
        elif word:
            out.append("".join(word))
            word = []
    if word:
        out.append("".join(word))
    return out


def phrase_contains_keyword(phrase: str, keywords: frozenset[str]) -> bool:
    """Token-boundary containment after case folding and diacritic stripping."""
    if not keywords:
        return False
    haystack = " " + " ".join(_tokenize(_fold(phrase))) + " "
    for kw in keywords:
        needle = " " + " ".join(_tokenize(_fold(kw))) + " "
        if needle.strip() and needle in haystack:
            return True
    return False


def domain_matches(domain: str, sites: frozenset[str], mode: str = "suffix") -> bool:
    d = domain.casefold().rstrip(".")
    if mode == "exact":
        return d in sites
    if mode == "suffix":
        return any(d == site or d.endswith("." + site) for site in sites)
    raise ValueError(f"unknown site match mode {mode!r}")


def banner_matches(port: int, banner: str, entries: frozenset[str]) -> bool:
    # banner substrings compare case-sensitively; an optional port prefix
    # restricts the entry to that port
    for entry in entries:
        entry_port, needle = parse_banner_entry(entry)
        if entry_port is not None and entry_port != port:
            continue
        if needle and needle in banner:
            return True
    return False


def evaluate_indicators(
    event: TelemetryEvent,
    policy: PolicySet,
    classify: TextClassifierHandle | None = None,
    site_match_mode: str = "suffix",
    counters: IndicatorCounters | None = None,
) -> IndicatorVector:
    """Compute the five binary signals for one event.

    A classifier outage never fails the evaluation: x_hs is forced to 0 and
    the degradation counter incremented.
    """
    classify = classify or NullClassifier()
    x_dns = x_kw = x_proc = x_port = x_hs = 0
    if event.kind == "dns_query":
        x_dns = int(domain_matches(event.payload, policy.blocked_sites, site_match_mode))
    elif event.kind == "typed_phrase":
        x_kw = int(phrase_contains_keyword(event.payload, policy.bad_words))
        try:
            x_hs = int(classify.classify(event.payload))
        except ClassifierUnavailable:
            x_hs = 0
            if counters is not None:
                counters.classifier_unavailable += 1
    elif event.kind == "process_snapshot":
        names = {str(p).casefold() for p in event.payload}
        x_proc = int(bool(names & policy.malicious_processes))
    elif event.kind == "port_banner":
        x_port = int(
            banner_matches(
                int(event.payload["port"]), str(event.payload["banner"]), policy.vulnerable_banners
            )
        )
    return IndicatorVector(x_dns=x_dns, x_kw=x_kw, x_proc=x_proc, x_port=x_port, x_hs=x_hs, at=event.at)


def decide_or(x: IndicatorVector) -> bool:
    """OR decision rule: alert iff any indicator fired."""
    return any(v == 1 for v in x.as_tuple())


def risk_score(x: IndicatorVector, cfg: ScoreConfig) -> float:
    """Weighted indicator sum; alert-worthy iff >= cfg.threshold."""
    d = x.as_dict()
    return sum(cfg.weights[key] * d[key] for key in cfg.weights)


def average_utilization(samples: Sequence[UtilizationSample]) -> float:
    """Trapezoidal time average of instantaneous utilization."""
    if not samples:
        raise EmptyWindow("no utilization samples")
    if len(samples) == 1:
        return samples[0].u
    for a, b in zip(samples, samples[1:]):
        if b.at <= a.at:
            raise ValueError("sample timestamps must be strictly increasing")
    area = 0.0
    for a, b in zip(samples, samples[1:]):
        area += (a.u + b.u) / 2.0 * (b.at - a.at)
    return area / (samples[-1].at - samples[0].at)
