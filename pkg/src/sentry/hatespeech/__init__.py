"""Multilingual hateful-content classifier: normalization, TF-IDF features,
three model families per language, cross-validation, and the fallback
verifier protocol."""

from sentry.hatespeech.languages import LANGUAGES, LanguageGuess, detect_language, stem
from sentry.hatespeech.normalize import Document, UnsupportedLanguage, normalize_text
from sentry.hatespeech.vectorize import (
    EmptyCorpus,
    FeatureVector,
    Vocabulary,
    feature_matrix,
    fit_vocabulary,
    vectorize,
)
from sentry.hatespeech.models import (
    FAMILIES,
    HyperParams,
    TrainedClassifier,
    VocabMismatch,
    fit,
    predict,
)
from sentry.hatespeech.split import DegenerateClass, SplitSpec, augment, stratified_folds, stratified_split
from sentry.hatespeech.evaluate import CrossValidationResult, cross_validate
from sentry.hatespeech.fallback import (
    DivergenceStore,
    FallbackCounters,
    MockVerifier,
    fallback_verify,
)

__all__ = [
    "LANGUAGES",
    "LanguageGuess",
    "detect_language",
    "stem",
    "Document",
    "UnsupportedLanguage",
    "normalize_text",
    "EmptyCorpus",
    "FeatureVector",
    "Vocabulary",
    "feature_matrix",
    "fit_vocabulary",
    "vectorize",
    "FAMILIES",
    "HyperParams",
    "TrainedClassifier",
    "VocabMismatch",
    "fit",
    "predict",
    "DegenerateClass",
    "SplitSpec",
    "augment",
    "stratified_folds",
    "stratified_split",
    "CrossValidationResult",
    "cross_validate",
    "DivergenceStore",
    "FallbackCounters",
    "MockVerifier",
    "fallback_verify",
]
