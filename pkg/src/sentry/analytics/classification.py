"""Binary-classification metrics.

All rates follow the usual confusion-matrix definitions; divisions by zero
yield 0.0 and set the ``degenerate`` flag instead of raising.  AUC uses the
rank-statistic (Mann-Whitney) formulation with ties counted as half wins,
which equals the trapezoidal area under the ROC curve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class LengthMismatch(ValueError):
    """labels and predictions have different lengths."""


class OneClassOnly(ValueError):
    """AUC needs at least one positive and one negative sample."""


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class MetricReport:
    """One evaluation run's metric bundle.

    ``auc_roc`` and ``pam_area`` stay None until filled by a score-aware
    report; ``degenerate`` lists the rates that hit a 0/0 and were defined
    to 0.0.
    """

    accuracy: float = 0.0
    balanced_accuracy: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    specificity: float = 0.0
    auc_roc: float | None = None
    pam_area: float | None = None
    n_metrics: int = 5
    degenerate: list[str] = field(default_factory=list)

    def pam_axes(self) -> list[float]:
        """Metric values in the fixed polygon order (AUC, P, R, F1, spec)."""
        if self.auc_roc is None:
            raise ValueError("auc_roc not computed; cannot build PAM axes")
        return [self.auc_roc, self.precision, self.recall, self.f1, self.specificity]

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "balanced_accuracy": self.balanced_accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "specificity": self.specificity,
            "auc_roc": self.auc_roc,
            "pam_area": self.pam_area,
            "n_metrics": self.n_metrics,
            "degenerate": list(self.degenerate),
        }


def confusion(labels: Sequence[int], predictions: Sequence[int]) -> ConfusionCounts:
    if len(labels) != len(predictions):
        raise LengthMismatch(f"{len(labels)} labels vs {len(predictions)} predictions")
    tp = fp = tn = fn = 0
    for y, p in zip(labels, predictions):
        if y not in (0, 1) or p not in (0, 1):
            raise ValueError("labels and predictions must be binary 0/1")
        if y == 1 and p == 1:
            tp += 1
        elif y == 0 and p == 1:
            fp += 1
        elif y == 0 and p == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _safe_div(num: float, den: float, name: str, degenerate: list[str]) -> float:
    if den == 0:
        degenerate.append(name)
        return 0.0
    return num / den


def rates(c: ConfusionCounts) -> MetricReport:
    """Accuracy, balanced accuracy, precision, recall, F1, specificity."""
    deg: list[str] = []
    precision = _safe_div(c.tp, c.tp + c.fp, "precision", deg)
    recall = _safe_div(c.tp, c.tp + c.fn, "recall", deg)
    specificity = _safe_div(c.tn, c.tn + c.fp, "specificity", deg)
    f1 = _safe_div(2 * precision * recall, precision + recall, "f1", deg)
    accuracy = _safe_div(c.tp + c.tn, c.total, "accuracy", deg)
    return MetricReport(
        accuracy=accuracy,
        balanced_accuracy=(recall + specificity) / 2.0,
        precision=precision,
        recall=recall,
        f1=f1,
        specificity=specificity,
        degenerate=deg,
    )


def balanced_accuracy(c: ConfusionCounts) -> float:
    return rates(c).balanced_accuracy


def auc_roc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """P(random positive outscores random negative), ties counted half.

    Computed from mid-ranks so runtime is O(n log n); equals brute-force
    pair counting exactly.
    """
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly(f"n_pos={n_pos}, n_neg={n_neg}")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s), dtype=float)
    sorted_s = s[order]
    i = 0
    rank = 1
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        mid = (rank + rank + (j - i)) / 2.0
        ranks[order[i : j + 1]] = mid
        rank += j - i + 1
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[y == 1]))
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def score_report(labels: Sequence[int], scores: Sequence[float], threshold: float = 0.5) -> MetricReport:
    """Full MetricReport from scores: rates at ``threshold`` plus AUC and PAM."""
    from sentry.analytics.pam import pam_area

    preds = [1 if s >= threshold else 0 for s in scores]
    report = rates(confusion(labels, preds))
    report.auc_roc = auc_roc(scores, labels)
    report.pam_area = pam_area(report.pam_axes())
    return report
