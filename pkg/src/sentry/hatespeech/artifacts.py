"""Model bundle files: vocabulary, hyperparameters, fitted parameters, and
a content hash, in one versioned JSON document."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from sentry.hatespeech.models import HyperParams, TrainedClassifier
from sentry.hatespeech.vectorize import Vocabulary

FORMAT = "sentry-model/1"


class ArtifactCorrupt(ValueError):
    """Content hash mismatch or unknown bundle format."""


def _body_hash(body: dict) -> str:
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def save_model(model: TrainedClassifier, vocab: Vocabulary, path: str | Path) -> Path:
    if model.family == "mnb":
        params = {
            "class_log_prior": model.class_log_prior.tolist(),
            "feature_log_prob": model.feature_log_prob.tolist(),
        }
    else:
        params = {"weights": model.weights.tolist(), "bias": model.bias}
    body = {
        "format": FORMAT,
        "family": model.family,
        "language": model.language,
        "hyper": model.hyper.as_dict(),
        "vocab": {"terms": list(vocab.terms), "df": list(vocab.df), "n_docs": vocab.n_docs},
        "params": params,
        "meta": {
            "n_iter": model.n_iter,
            "converged": model.converged,
            "early_stopped": model.early_stopped,
            "vocab_hash": model.vocab_hash or vocab.content_hash,
        },
    }
    doc = dict(body)
    doc["content_hash"] = _body_hash(body)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=1), encoding="utf-8")
    return path


def load_model(path: str | Path) -> tuple[TrainedClassifier, Vocabulary]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != FORMAT:
        raise ArtifactCorrupt(f"unknown bundle format {doc.get('format')!r}")
    stored_hash = doc.pop("content_hash", None)
    if stored_hash != _body_hash(doc):
        raise ArtifactCorrupt(f"{path}: content hash mismatch")
    vocab = Vocabulary(
        terms=tuple(doc["vocab"]["terms"]),
        df=tuple(doc["vocab"]["df"]),
        n_docs=int(doc["vocab"]["n_docs"]),
    )
    model = TrainedClassifier(
        family=doc["family"],
        language=doc["language"],
        hyper=HyperParams(**doc["hyper"]),
        vocab_hash=doc["meta"]["vocab_hash"],
        n_iter=int(doc["meta"]["n_iter"]),
        converged=bool(doc["meta"]["converged"]),
        early_stopped=bool(doc["meta"]["early_stopped"]),
    )
    params = doc["params"]
    if model.family == "mnb":
        model.class_log_prior = np.array(params["class_log_prior"])
        model.feature_log_prob = np.array(params["feature_log_prob"])
    else:
        model.weights = np.array(params["weights"])
        model.bias = float(params["bias"])
    return model, vocab
