"""TF-IDF features.

tf(t,d) is the within-document relative frequency, idf uses the smoothed
form ln((N+1)/(df+1)) + 1, and document vectors are L2-normalized with a
1e-12 guard so cosine similarity reduces to a dot product.  Terms outside
the fitted vocabulary are ignored (the vector stays padded with zeros at
model width); they still count toward the tf denominator.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sentry.hatespeech.normalize import Document

L2_EPSILON = 1e-12


class EmptyCorpus(ValueError):
    """Vocabulary needs at least one non-empty document."""


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if len(self.terms) != len(self.df):
            raise ValueError("terms and df length mismatch")
        for term, d in zip(self.terms, self.df):
            if not 1 <= d <= self.n_docs:
                raise ValueError(f"df({term!r})={d} outside [1, {self.n_docs}]")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def index(self, term: str) -> int | None:
        return self._index.get(term)

    def idf(self, term_idx: int) -> float:
        return math.log((self.n_docs + 1) / (self.df[term_idx] + 1)) + 1.0

    def idf_vector(self) -> np.ndarray:
        return np.log((self.n_docs + 1) / (np.asarray(self.df, dtype=float) + 1.0)) + 1.0

    @property
    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n_docs).encode())
        for term, d in zip(self.terms, self.df):
            h.update(term.encode("utf-8") + b"\x00" + str(d).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class FeatureVector:
    entries: dict[int, float]
    norm: float

    def dense(self, width: int) -> np.ndarray:
        out = np.zeros(width)
        for idx, val in self.entries.items():
            out[idx] = val
        return out


def fit_vocabulary(corpus: Sequence[Document]) -> Vocabulary:
    """Document-frequency table over lexicographically ordered terms."""
    n_docs = len(corpus)
    if n_docs == 0 or all(doc.is_empty for doc in corpus):
        raise EmptyCorpus("no non-empty documents")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc.tokens()))
    terms = tuple(sorted(df))
    return Vocabulary(terms=terms, df=tuple(df[t] for t in terms), n_docs=n_docs)


def vectorize(doc: Document, vocab: Vocabulary) -> FeatureVector:
    tokens = doc.tokens()
    if not tokens:
        return FeatureVector(entries={}, norm=0.0)
    counts = Counter(tokens)
    total = len(tokens)
    raw: dict[int, float] = {}
    for term, n in counts.items():
        idx = vocab.index(term)
        if idx is None:
            continue
        raw[idx] = (n / total) * vocab.idf(idx)
    norm = math.sqrt(sum(v * v for v in raw.values()))
    if norm == 0.0:
        return FeatureVector(entries={}, norm=0.0)
    scaled = {i: v / (norm + L2_EPSILON) for i, v in raw.items()}
    return FeatureVector(entries=scaled, norm=norm)


def feature_matrix(docs: Sequence[Document], vocab: Vocabulary) -> np.ndarray:
    """Dense (n_docs, vocab) matrix of normalized TF-IDF rows."""
    out = np.zeros((len(docs), len(vocab)))
    for i, doc in enumerate(docs):
        for idx, val in vectorize(doc, vocab).entries.items():
            out[i, idx] = val
    return out
