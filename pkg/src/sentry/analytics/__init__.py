"""Evaluation mathematics: classification metrics, polygon area scoring,
scalability regression, queueing estimators, and the load-test harness."""

from sentry.analytics.classification import (
    ConfusionCounts,
    LengthMismatch,
    MetricReport,
    OneClassOnly,
    auc_roc,
    balanced_accuracy,
    confusion,
    rates,
    score_report,
)
from sentry.analytics.pam import PAM_AXES, BadDimension, OutOfRange, max_pam_area, pam_area
from sentry.analytics.queueing import JobRecord, QueueWindowStats, queue_stats, simulate_poisson_queue
from sentry.analytics.regression import DegenerateX, RegressionFit, fit_linear, predict_linear

__all__ = [
    "ConfusionCounts",
    "MetricReport",
    "LengthMismatch",
    "OneClassOnly",
    "confusion",
    "rates",
    "balanced_accuracy",
    "auc_roc",
    "score_report",
    "PAM_AXES",
    "BadDimension",
    "OutOfRange",
    "pam_area",
    "max_pam_area",
    "RegressionFit",
    "DegenerateX",
    "fit_linear",
    "predict_linear",
    "JobRecord",
    "QueueWindowStats",
    "queue_stats",
    "simulate_poisson_queue",
]
