"""Text normalization pipeline.

Stages run in fixed order: lowercase, clean (URLs, mentions, symbol
noise), stopword removal, suffix-stripping stemming.  A trailing stopword
filter drops stems that landed on a stopword, which makes the whole
composition idempotent at the text level.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from sentry.hatespeech.languages import LANGUAGES, STOPWORDS, stem


class UnsupportedLanguage(ValueError):
    pass


@dataclass(frozen=True)
class Document:
    raw: str
    normalized: str
    language: str
    label: int | None = None

    def __post_init__(self):
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"label must be 0/1, got {self.label!r}")

    @property
    def is_empty(self) -> bool:
        return not self.normalized

    def tokens(self) -> list[str]:
        return self.normalized.split()

    def with_label(self, label: int) -> "Document":
        return Document(self.raw, self.normalized, self.language, label)


_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")


def _clean(text: str) -> str:
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    return "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in text)


def normalize_text(raw: str, language: str, label: int | None = None) -> Document:
    if language not in LANGUAGES:
        raise UnsupportedLanguage(f"language {language!r} not in {LANGUAGES}")
    stopwords = STOPWORDS[language]
    tokens = _clean(raw.lower()).split()
    kept = [t for t in tokens if t not in stopwords]
    stems = [stem(t, language) for t in kept]
    stems = [s for s in stems if s and s not in stopwords]
    return Document(raw=raw, normalized=" ".join(stems), language=language, label=label)
