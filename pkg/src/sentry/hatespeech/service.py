"""Prediction service: language routing plus the /predict JSON contract."""
from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from sentry.hatespeech.artifacts import load_model
from sentry.hatespeech.fallback import DivergenceStore, FallbackCounters, FallbackVerifier, fallback_verify
from sentry.hatespeech.kernels import BACKEND
from sentry.hatespeech.languages import detect_language
from sentry.hatespeech.models import TrainedClassifier, predict
from sentry.hatespeech.normalize import normalize_text
from sentry.hatespeech.vectorize import Vocabulary

log = logging.getLogger(__name__)


class ClassifierRegistry:
    """Holds one (model, vocab) pair per language plus the fallback wiring."""

    def __init__(
        self,
        verifier: FallbackVerifier | None = None,
        divergence_path: str | Path | None = None,
    ):
        self._models: dict[str, tuple[TrainedClassifier, Vocabulary]] = {}
        self._lock = threading.Lock()
        self.verifier = verifier
        self.divergence = DivergenceStore(divergence_path) if divergence_path else None
        self.fallback_counters = FallbackCounters()

    def register(self, language: str, model: TrainedClassifier, vocab: Vocabulary) -> None:
        with self._lock:
            self._models[language] = (model, vocab)

    def load_artifact(self, path: str | Path) -> str:
        model, vocab = load_model(path)
        self.register(model.language, model, vocab)
        return model.language

    def languages(self) -> list[str]:
        with self._lock:
            return sorted(self._models)

    def classify(self, phrase: str) -> tuple[int, str]:
        """(classification, language); raises KeyError when no model fits."""
        guess = detect_language(phrase)
        with self._lock:
            entry = self._models.get(guess.language)
        if entry is None:
            raise KeyError(guess.language)
        model, vocab = entry
        doc = normalize_text(phrase, guess.language)
        label, _score = predict(model, doc, vocab)
        label = fallback_verify(
            phrase, label, self.verifier, self.divergence, self.fallback_counters
        )
        return label, guess.language


def create_prediction_app(registry: ClassifierRegistry) -> FastAPI:
    app = FastAPI(title="prediction-service", docs_url=None, redoc_url=None)
    app.state.registry = registry

    @app.get("/health")
    def health():
        return {"status": "ok", "languages": registry.languages(), "kernel_backend": BACKEND}

    @app.post("/predict")
    async def predict_phrase(body: dict | None = None):
        phrase = (body or {}).get("phrase")
        if not isinstance(phrase, str) or not phrase.strip():
            return JSONResponse(
                status_code=400, content={"error": "empty_phrase", "detail": "phrase required"}
            )
        try:
            classification, language = registry.classify(phrase)
        except KeyError as exc:
            return JSONResponse(
                status_code=503,
                content={"error": "no_model", "detail": f"no model loaded for {exc.args[0]!r}"},
            )
        return [{"phrase": phrase, "classification": classification, "language": language}]

    return app
