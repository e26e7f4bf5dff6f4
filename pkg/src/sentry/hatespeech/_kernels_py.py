"""Numpy implementation of the training hot loops.

Import through sentry.hatespeech.kernels, which prefers the compiled
extension and falls back here.  Both backends implement the same two
functions with identical signatures and semantics.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def _neg_sigmoid_neg(m: np.ndarray) -> np.ndarray:
    """-sigmoid(-m), computed without overflow for large |m|."""
    out = np.empty_like(m)
    pos = m >= 0
    em = np.exp(-m[pos])  # <= 1, safe
    out[pos] = -em / (1.0 + em)
    out[~pos] = -1.0 / (1.0 + np.exp(m[~pos]))  # exp of a negative, safe
    return out


def logistic_loss_grad(X: np.ndarray, z: np.ndarray, w: np.ndarray, b: float):
    """Smooth logistic loss mean(log(1+exp(-z*(Xw+b)))) and its gradient.

    z holds +-1 labels.  Returns (loss, grad_w, grad_b).
    """
    n = X.shape[0]
    m = z * (X @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -m)))
    c = z * _neg_sigmoid_neg(m)
    grad_w = (X.T @ c) / n
    grad_b = float(np.mean(c))
    return loss, grad_w, grad_b


def hinge_loss_grad(X: np.ndarray, z: np.ndarray, w: np.ndarray, b: float, reg: float):
    """L2-regularized hinge objective and a subgradient.

    objective = mean(max(0, 1 - z*(Xw+b))) + reg/2 * ||w||^2
    """
    n = X.shape[0]
    m = z * (X @ w + b)
    slack = 1.0 - m
    active = slack > 0.0
    obj = float(np.mean(np.maximum(slack, 0.0)) + 0.5 * reg * float(w @ w))
    za = z * active
    grad_w = -(X.T @ za) / n + reg * w
    grad_b = -float(np.sum(za)) / n
    return obj, grad_w, grad_b
