"""Blacklist sets and the agent's scoring configuration.

A PolicySet is immutable once published; agents swap an atomic reference
to the latest version.  Every mutation helper returns a new instance with
version incremented by exactly one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

INDICATOR_KEYS = ("dns", "kw", "proc", "port", "hs")

# categories whose tokens are case-folded; service banners stay byte-oriented
_FOLDED = ("blocked_sites", "bad_words", "malicious_processes")
CATEGORIES = ("blocked_sites", "bad_words", "malicious_processes", "vulnerable_banners")


def _clean_tokens(tokens: Iterable[str], fold: bool) -> frozenset[str]:
    out = set()
    for tok in tokens:
        tok = tok.strip()
        if not tok:
            continue
        if ";" in tok:
            raise ValueError(f"token {tok!r} contains the ';' delimiter")
        out.add(tok.casefold() if fold else tok)
    return frozenset(out)


def parse_banner_entry(entry: str) -> tuple[int | None, str]:
    """Split an optional port prefix off a banner token.

    "21:vsftpd 2.3.4" -> (21, "vsftpd 2.3.4"); "OpenSSH" -> (None, "OpenSSH").
    Only a leading all-digit prefix before the first ':' is a port.
    """
    head, sep, rest = entry.partition(":")
    if sep and head.isdigit():
        return int(head), rest
    return None, entry


@dataclass(frozen=True)
class PolicySet:
    blocked_sites: frozenset[str] = frozenset()
    bad_words: frozenset[str] = frozenset()
    malicious_processes: frozenset[str] = frozenset()
    vulnerable_banners: frozenset[str] = frozenset()
    version: int = 0
    fetched_at: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in CATEGORIES:
            cleaned = _clean_tokens(getattr(self, name), fold=name in _FOLDED)
            object.__setattr__(self, name, cleaned)
        if self.version < 0:
            raise ValueError("version must be non-negative")

    def with_added(self, category: str, tokens: Iterable[str]) -> "PolicySet":
        return self._mutate(category, lambda cur: cur | _clean_tokens(tokens, category in _FOLDED))

    def with_removed(self, category: str, tokens: Iterable[str]) -> "PolicySet":
        return self._mutate(category, lambda cur: cur - _clean_tokens(tokens, category in _FOLDED))

    def _mutate(self, category: str, op) -> "PolicySet":
        if category not in CATEGORIES:
            raise KeyError(f"unknown blacklist category {category!r}")
        fields = {name: getattr(self, name) for name in CATEGORIES}
        fields[category] = op(fields[category])
        return PolicySet(version=self.version + 1, fetched_at=self.fetched_at, **fields)

    def counts(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in CATEGORIES}


@dataclass(frozen=True)
class ScoreConfig:
    """Indicator weights, alerting threshold, and policy refresh interval."""

    weights: dict[str, float]
    threshold: float = 1.0
    update_interval: float = 60.0

    def __post_init__(self):
        missing = set(INDICATOR_KEYS) - set(self.weights)
        if missing:
            raise ValueError(f"weights missing indicators: {sorted(missing)}")
        extra = set(self.weights) - set(INDICATOR_KEYS)
        if extra:
            raise ValueError(f"unknown indicator weights: {sorted(extra)}")
        for key, w in self.weights.items():
            if w < 0:
                raise ValueError(f"weight {key}={w} must be non-negative")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.update_interval <= 0:
            raise ValueError("update_interval must be positive")

    @classmethod
    def default(cls) -> "ScoreConfig":
        # any single indicator fires (OR-rule compatible) while proc/hs rank higher
        return cls(weights={"dns": 1.0, "kw": 1.0, "proc": 2.0, "port": 1.0, "hs": 3.0})

    @classmethod
    def uniform(cls, threshold: float = 1.0) -> "ScoreConfig":
        return cls(weights={k: 1.0 for k in INDICATOR_KEYS}, threshold=threshold)
