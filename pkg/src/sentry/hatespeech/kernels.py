"""Backend selection for the training hot loops.

The compiled extension is preferred when present; the numpy fallback is
always available.  Set SENTRY_PURE_PYTHON=1 to force the fallback (used by
the backend-equivalence tests and the benchmark).
"""
from __future__ import annotations

import os

import numpy as np

if os.environ.get("SENTRY_PURE_PYTHON"):
    from sentry.hatespeech import _kernels_py as _backend
else:
    try:
        from sentry.hatespeech import _kernels_c as _backend  # type: ignore[attr-defined]
    except ImportError:
        from sentry.hatespeech import _kernels_py as _backend

BACKEND = _backend.BACKEND


def _as_c(X: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(X, dtype=np.float64)


def logistic_loss_grad(X, z, w, b):
    loss, gw, gb = _backend.logistic_loss_grad(_as_c(X), _as_c(z), _as_c(w), float(b))
    return float(loss), np.asarray(gw), float(gb)


def hinge_loss_grad(X, z, w, b, reg):
    obj, gw, gb = _backend.hinge_loss_grad(_as_c(X), _as_c(z), _as_c(w), float(b), float(reg))
    return float(obj), np.asarray(gw), float(gb)
