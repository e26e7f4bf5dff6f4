"""k-fold cross-validation over the classifier families.

Each fold fits its own vocabulary on the training portion (no term
leakage), trains, scores the held-out portion, and reports the full metric
bundle.  Aggregates are the fold mean and population standard deviation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from sentry.analytics.classification import MetricReport, score_report
from sentry.hatespeech.models import HyperParams, fit_matrix, predict_matrix
from sentry.hatespeech.normalize import Document
from sentry.hatespeech.split import stratified_folds
from sentry.hatespeech.vectorize import feature_matrix, fit_vocabulary

_METRIC_FIELDS = (
    "accuracy",
    "balanced_accuracy",
    "precision",
    "recall",
    "f1",
    "specificity",
    "auc_roc",
    "pam_area",
)


@dataclass
class CrossValidationResult:
    family: str
    k: int
    folds: list[MetricReport] = field(default_factory=list)

    def mean(self, metric: str) -> float:
        return float(np.mean([getattr(r, metric) for r in self.folds]))

    def std(self, metric: str) -> float:
        return float(np.std([getattr(r, metric) for r in self.folds]))

    def summary(self) -> dict:
        out: dict = {"family": self.family, "k": self.k, "folds": [r.as_dict() for r in self.folds]}
        out["mean"] = {m: self.mean(m) for m in _METRIC_FIELDS}
        out["std"] = {m: self.std(m) for m in _METRIC_FIELDS}
        return out


def _svm_threshold(family: str) -> float:
    return 0.0 if family == "linear_svm" else 0.5


def cross_validate(
    corpus: Sequence[Document],
    family: str,
    hyper: HyperParams | None = None,
    k: int = 5,
    seed: int = 0,
) -> CrossValidationResult:
    result = CrossValidationResult(family=family, k=k)
    for train, test in stratified_folds(corpus, k=k, seed=seed):
        vocab = fit_vocabulary(train)
        model = fit_matrix(
            feature_matrix(train, vocab),
            np.array([d.label for d in train]),
            family,
            hyper,
            vocab_hash=vocab.content_hash,
        )
        _labels, scores = predict_matrix(model, feature_matrix(test, vocab))
        y_true = [d.label for d in test]
        result.folds.append(score_report(y_true, list(scores), threshold=_svm_threshold(family)))
    return result


def fold_mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population std of per-fold metric values."""
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())
