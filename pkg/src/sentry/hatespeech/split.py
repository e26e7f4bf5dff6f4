"""Stratified partitioning and label-preserving augmentation.

Splits allocate floor(n_c * frac) members of each class to train and
validation and the remainder to test, after a seeded per-class shuffle, so
class priors carry over exactly up to rounding.  Folds are built by
round-robin assignment within each class, giving every fold the same class
counts up to one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from sentry.hatespeech.languages import THESAURUS
from sentry.hatespeech.normalize import Document, normalize_text


class DegenerateClass(ValueError):
    """A class is absent or smaller than the fold count."""


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.70
    val_frac: float = 0.15
    test_frac: float = 0.15
    k_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        total = self.train_frac + self.val_frac + self.test_frac
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {total}, not 1")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")


def _class_indices(corpus: Sequence[Document], k_folds: int) -> dict[int, list[int]]:
    by_class: dict[int, list[int]] = {0: [], 1: []}
    for i, doc in enumerate(corpus):
        if doc.label is None:
            raise ValueError(f"document {i} is unlabeled")
        by_class[doc.label].append(i)
    for c, members in by_class.items():
        if len(members) < k_folds:
            raise DegenerateClass(f"class {c} has {len(members)} members, need >= {k_folds}")
    return by_class


def stratified_split(
    corpus: Sequence[Document], spec: SplitSpec | None = None
) -> tuple[list[Document], list[Document], list[Document]]:
    spec = spec or SplitSpec()
    if len(corpus) < 10:
        raise ValueError("corpus too small to split, need >= 10 documents")
    by_class = _class_indices(corpus, spec.k_folds)
    rng = np.random.default_rng(spec.seed)
    train_idx: list[int] = []
    val_idx: list[int] = []
    test_idx: list[int] = []
    for _c, members in sorted(by_class.items()):
        order = list(np.array(members)[rng.permutation(len(members))])
        n_train = int(len(order) * spec.train_frac)
        n_val = int(len(order) * spec.val_frac)
        train_idx += order[:n_train]
        val_idx += order[n_train : n_train + n_val]
        test_idx += order[n_train + n_val :]
    return (
        [corpus[i] for i in sorted(train_idx)],
        [corpus[i] for i in sorted(val_idx)],
        [corpus[i] for i in sorted(test_idx)],
    )


def stratified_folds(
    corpus: Sequence[Document], k: int = 5, seed: int = 0
) -> list[tuple[list[Document], list[Document]]]:
    """k (train, test) pairs with per-class round-robin fold assignment."""
    by_class = _class_indices(corpus, k)
    rng = np.random.default_rng(seed)
    fold_of = np.zeros(len(corpus), dtype=int)
    for _c, members in sorted(by_class.items()):
        order = list(np.array(members)[rng.permutation(len(members))])
        for pos, idx in enumerate(order):
            fold_of[idx] = pos % k
    folds = []
    for f in range(k):
        train = [corpus[i] for i in range(len(corpus)) if fold_of[i] != f]
        test = [corpus[i] for i in range(len(corpus)) if fold_of[i] == f]
        folds.append((train, test))
    return folds


AugmentationOperator = Callable[[str, str, np.random.Generator], str]


def synonym_or_swap(raw: str, language: str, rng: np.random.Generator) -> str:
    """Default operator: replace one known token with its synonym, else
    swap a random adjacent token pair."""
    tokens = raw.split()
    thesaurus = THESAURUS.get(language, {})
    replaceable = [i for i, t in enumerate(tokens) if t.lower() in thesaurus]
    if replaceable:
        i = replaceable[int(rng.integers(0, len(replaceable)))]
        tokens[i] = thesaurus[tokens[i].lower()]
        return " ".join(tokens)
    if len(tokens) >= 2:
        i = int(rng.integers(0, len(tokens) - 1))
        tokens[i], tokens[i + 1] = tokens[i + 1], tokens[i]
        return " ".join(tokens)
    return raw


def augment(
    corpus: Sequence[Document],
    op: AugmentationOperator | None = None,
    seed: int = 0,
) -> list[Document]:
    """Original corpus plus one perturbed, label-preserving variant each."""
    op = op or synonym_or_swap
    rng = np.random.default_rng(seed)
    out = list(corpus)
    for doc in corpus:
        perturbed = op(doc.raw, doc.language, rng)
        out.append(normalize_text(perturbed, doc.language, label=doc.label))
    return out
