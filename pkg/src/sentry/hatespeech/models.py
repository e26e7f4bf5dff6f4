"""The three classifier families.

- logreg: L1-penalized logistic loss minimized by proximal gradient
  (ISTA) with a power-iteration Lipschitz step, so the objective is
  monotone non-increasing.  Penalty strength follows the C convention:
  lambda = 1 / (C * n).
- linear_svm: full-batch subgradient descent on the hinge loss with L2
  regularization ||w||^2 / (2 * C * n), best iterate kept.  The recorded
  gamma hyperparameter is inert metadata (linear kernel).
- mnb: closed-form multinomial naive Bayes over TF-IDF values as
  fractional counts, Laplace-smoothed with alpha.

Both iterative families stop when the objective improvement falls below
tol or max_iter is hit; a validation set adds rising-loss early stopping.
Hitting max_iter sets converged=False on the model, never a silent pass.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from sentry.hatespeech.kernels import hinge_loss_grad, logistic_loss_grad
from sentry.hatespeech.normalize import Document
from sentry.hatespeech.vectorize import Vocabulary, feature_matrix, vectorize

log = logging.getLogger(__name__)

FAMILIES = ("logreg", "linear_svm", "mnb")


class VocabMismatch(ValueError):
    """Model was fitted against a different vocabulary version."""


@dataclass(frozen=True)
class HyperParams:
    """Defaults follow the platform's tuned configuration."""

    c_logreg: float = 1.2
    c_svm: float = 1.0
    gamma: float = 0.01  # recorded only; unused by the linear kernel
    tol: float = 1e-4
    max_iter: int = 10_000
    alpha: float = 1.0
    fit_prior: bool = True
    patience: int = 5
    val_every: int = 10

    def __post_init__(self):
        for name in ("c_logreg", "c_svm", "gamma", "tol", "alpha"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1 or self.patience < 1 or self.val_every < 1:
            raise ValueError("max_iter, patience and val_every must be >= 1")

    def as_dict(self) -> dict:
        return {
            "c_logreg": self.c_logreg,
            "c_svm": self.c_svm,
            "gamma": self.gamma,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "alpha": self.alpha,
            "fit_prior": self.fit_prior,
            "patience": self.patience,
            "val_every": self.val_every,
        }


@dataclass
class TrainedClassifier:
    family: str
    language: str
    hyper: HyperParams
    vocab_hash: str
    weights: np.ndarray | None = None  # logreg / linear_svm
    bias: float = 0.0
    class_log_prior: np.ndarray | None = None  # mnb
    feature_log_prob: np.ndarray | None = None  # mnb, shape (2, V)
    loss_history: list[float] = field(default_factory=list)
    val_history: list[float] = field(default_factory=list)
    n_iter: int = 0
    converged: bool = True
    early_stopped: bool = False


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _lipschitz_logistic(X: np.ndarray) -> float:
    """Upper bound L = sigma_max([X 1])^2 / (4n) via power iteration."""
    n = X.shape[0]
    aug = np.hstack([X, np.ones((n, 1))])
    v = np.full(aug.shape[1], 1.0 / np.sqrt(aug.shape[1]))
    s = 1.0
    for _ in range(100):
        u = aug.T @ (aug @ v)
        s = float(np.linalg.norm(u))
        if s == 0.0:
            return 1e-12
        v = u / s
    return s / (4.0 * n) * 1.05  # safety margin over the power-iteration estimate


def _labels_pm1(y: np.ndarray) -> np.ndarray:
    return np.where(y == 1, 1.0, -1.0)


def _fit_logreg(X, y, hyper: HyperParams, X_val=None, y_val=None):
    n, d = X.shape
    z = _labels_pm1(y)
    lam = 1.0 / (hyper.c_logreg * n)
    step = 1.0 / _lipschitz_logistic(X)
    w = np.zeros(d)
    b = 0.0
    history: list[float] = []
    val_history: list[float] = []
    z_val = _labels_pm1(y_val) if y_val is not None else None
    best_val = np.inf
    rises = 0
    converged = False
    early = False
    it = 0
    prev_obj = np.inf
    for it in range(1, hyper.max_iter + 1):
        loss, gw, gb = logistic_loss_grad(X, z, w, b)
        obj = loss + lam * float(np.sum(np.abs(w)))
        history.append(obj)
        if prev_obj - obj < hyper.tol and it > 1:
            converged = True
            break
        prev_obj = obj
        w = soft_threshold(w - step * gw, step * lam)
        b -= step * gb
        if X_val is not None and it % hyper.val_every == 0:
            vloss, _, _ = logistic_loss_grad(X_val, z_val, w, b)
            val_history.append(vloss)
            if vloss > best_val:
                rises += 1
                if rises >= hyper.patience:
                    converged = True
                    early = True
                    break
            else:
                best_val = vloss
                rises = 0
    return w, b, history, val_history, it, converged, early


def _fit_svm(X, y, hyper: HyperParams, X_val=None, y_val=None):
    n, d = X.shape
    z = _labels_pm1(y)
    reg = 1.0 / (hyper.c_svm * n)
    w = np.zeros(d)
    b = 0.0
    best = (np.inf, w.copy(), b)
    history: list[float] = []
    val_history: list[float] = []
    z_val = _labels_pm1(y_val) if y_val is not None else None
    best_val = np.inf
    rises = 0
    stall = 0
    converged = False
    early = False
    it = 0
    for it in range(1, hyper.max_iter + 1):
        obj, gw, gb = hinge_loss_grad(X, z, w, b, reg)
        history.append(obj)
        if obj < best[0] - hyper.tol:
            best = (obj, w.copy(), b)
            stall = 0
        else:
            if obj < best[0]:
                best = (obj, w.copy(), b)
            stall += 1
            if stall >= 25:
                converged = True
                break
        step = 1.0 / np.sqrt(it)
        w = w - step * gw
        b -= step * gb
        if X_val is not None and it % hyper.val_every == 0:
            vobj, _, _ = hinge_loss_grad(X_val, z_val, best[1], best[2], reg)
            val_history.append(vobj)
            if vobj > best_val:
                rises += 1
                if rises >= hyper.patience:
                    converged = True
                    early = True
                    break
            else:
                best_val = vobj
                rises = 0
    _, w, b = best
    return w, b, history, val_history, it, converged, early


def _fit_mnb(X, y, hyper: HyperParams):
    v = X.shape[1]
    counts = np.zeros((2, v))
    class_n = np.zeros(2)
    for c in (0, 1):
        rows = X[y == c]
        counts[c] = rows.sum(axis=0)
        class_n[c] = rows.shape[0]
    if hyper.fit_prior:
        prior = class_n / class_n.sum()
    else:
        prior = np.array([0.5, 0.5])
    feature_log_prob = np.log(
        (counts + hyper.alpha) / (counts.sum(axis=1, keepdims=True) + hyper.alpha * v)
    )
    return np.log(prior), feature_log_prob


def fit_matrix(
    X: np.ndarray,
    y: np.ndarray,
    family: str,
    hyper: HyperParams | None = None,
    language: str = "en",
    vocab_hash: str = "",
    X_val: np.ndarray | None = None,
    y_val: np.ndarray | None = None,
) -> TrainedClassifier:
    hyper = hyper or HyperParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if set(np.unique(y)) != {0, 1}:
        raise ValueError("training set must contain both classes")
    model = TrainedClassifier(family=family, language=language, hyper=hyper, vocab_hash=vocab_hash)
    if family == "logreg":
        w, b, hist, vhist, n_iter, converged, early = _fit_logreg(X, y, hyper, X_val, y_val)
        model.weights, model.bias = w, b
        model.loss_history, model.val_history = hist, vhist
        model.n_iter, model.converged, model.early_stopped = n_iter, converged, early
    elif family == "linear_svm":
        w, b, hist, vhist, n_iter, converged, early = _fit_svm(X, y, hyper, X_val, y_val)
        model.weights, model.bias = w, b
        model.loss_history, model.val_history = hist, vhist
        model.n_iter, model.converged, model.early_stopped = n_iter, converged, early
    elif family == "mnb":
        model.class_log_prior, model.feature_log_prob = _fit_mnb(X, y, hyper)
        model.n_iter = 1
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if not model.converged:
        log.warning("%s hit max_iter=%d without converging", family, hyper.max_iter)
    return model


def fit(
    train: Sequence[Document],
    family: str,
    hyper: HyperParams | None = None,
    vocab: Vocabulary | None = None,
    val: Sequence[Document] | None = None,
    language: str | None = None,
) -> TrainedClassifier:
    if vocab is None:
        from sentry.hatespeech.vectorize import fit_vocabulary

        vocab = fit_vocabulary(list(train))
    lang = language or (train[0].language if train else "en")
    X = feature_matrix(train, vocab)
    y = np.array([doc.label for doc in train])
    X_val = y_val = None
    if val:
        X_val = feature_matrix(val, vocab)
        y_val = np.array([doc.label for doc in val])
    return fit_matrix(
        X, y, family, hyper, language=lang, vocab_hash=vocab.content_hash, X_val=X_val, y_val=y_val
    )


def _stable_sigmoid(m: np.ndarray) -> np.ndarray:
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
    em = np.exp(m[~pos])
    out[~pos] = em / (1.0 + em)
    return out


def _scores_matrix(model: TrainedClassifier, X: np.ndarray) -> np.ndarray:
    if model.family == "mnb":
        joint = X @ model.feature_log_prob.T + model.class_log_prior
        shift = joint.max(axis=1, keepdims=True)
        p = np.exp(joint - shift)
        return p[:, 1] / p.sum(axis=1)
    margins = X @ model.weights + model.bias
    if model.family == "linear_svm":
        return margins
    return _stable_sigmoid(margins)  # logreg probability


def predict_matrix(model: TrainedClassifier, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) for a feature matrix row block."""
    scores = _scores_matrix(model, np.asarray(X, dtype=float))
    if model.family == "linear_svm":
        labels = (scores >= 0.0).astype(int)
    else:
        labels = (scores >= 0.5).astype(int)
    return labels, scores


def predict(model: TrainedClassifier, doc: Document, vocab: Vocabulary) -> tuple[int, float]:
    """Label and score for one document; score is a probability for
    logreg/mnb and a signed margin for the SVM."""
    if model.vocab_hash and model.vocab_hash != vocab.content_hash:
        raise VocabMismatch("vocabulary version differs from the one used at fit time")
    x = vectorize(doc, vocab).dense(len(vocab))
    labels, scores = predict_matrix(model, x.reshape(1, -1))
    return int(labels[0]), float(scores[0])
