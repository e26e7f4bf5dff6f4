from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from sentry.hatespeech.normalize import Document
from sentry.hatespeech.vectorize import (
    EmptyCorpus,
    Vocabulary,
    feature_matrix,
    fit_vocabulary,
    vectorize,
)


def doc(text, label=None):
    return Document(raw=text, normalized=text, language="en", label=label)


def brute_force_tfidf(corpus_tokens: list[list[str]], doc_tokens: list[str]) -> dict[str, float]:
    """Independent oracle: literal formula evaluation, no shared code."""
    n = len(corpus_tokens)
    vocab = sorted({t for toks in corpus_tokens for t in toks})
    df = {t: sum(1 for toks in corpus_tokens if t in toks) for t in vocab}
    total = len(doc_tokens)
    raw = {}
    for term in vocab:
        count = sum(1 for t in doc_tokens if t == term)
        if count == 0 or total == 0:
            continue
        tf = count / total
        idf = math.log((n + 1) / (df[term] + 1)) + 1.0
        raw[term] = tf * idf
    norm = math.sqrt(sum(v * v for v in raw.values()))
    if norm == 0:
        return {}
    return {t: v / (norm + 1e-12) for t, v in raw.items()}


class TestVocabulary:
    def test_df_hand_count(self):
        vocab = fit_vocabulary([doc("a b"), doc("a")])
        assert vocab.terms == ("a", "b")
        assert vocab.df == (2, 1)
        assert vocab.n_docs == 2

    def test_df_counts_documents_not_occurrences(self):
        vocab = fit_vocabulary([doc("a a a")])
        assert vocab.df == (1,)

    def test_duplicated_docs_double_df(self):
        vocab = fit_vocabulary([doc("x y"), doc("x y")])
        assert vocab.df == (2, 2)

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            fit_vocabulary([])
        with pytest.raises(EmptyCorpus):
            fit_vocabulary([doc("")])

    def test_terms_lexicographic(self):
        vocab = fit_vocabulary([doc("zebra apple mango")])
        assert vocab.terms == ("apple", "mango", "zebra")

    def test_df_bounds_enforced(self):
        with pytest.raises(ValueError):
            Vocabulary(terms=("a",), df=(3,), n_docs=2)


class TestVectorize:
    def test_worked_example_frozen_values(self):
        corpus = [doc("a b"), doc("a")]
        vocab = fit_vocabulary(corpus)
        assert vocab.idf(vocab.index("a")) == pytest.approx(1.0, abs=1e-12)
        assert vocab.idf(vocab.index("b")) == pytest.approx(1.4054651081081644, abs=1e-9)
        fv = vectorize(corpus[0], vocab)
        dense = fv.dense(2)
        # oracle-exact values; the published 6-digit rounding (0.579739,
        # 0.814801) is checked at the looser precision it was printed at
        assert dense[vocab.index("a")] == pytest.approx(0.5797386715376658, abs=1e-9)
        assert dense[vocab.index("b")] == pytest.approx(0.8148024746662242, abs=1e-9)
        assert dense[vocab.index("a")] == pytest.approx(0.579739, abs=1e-5)
        assert dense[vocab.index("b")] == pytest.approx(0.814801, abs=1e-5)
        # raw (pre-normalization) values recoverable through the stored norm
        assert dense[vocab.index("a")] * (fv.norm + 1e-12) == pytest.approx(0.5, abs=1e-9)
        assert dense[vocab.index("b")] * (fv.norm + 1e-12) == pytest.approx(0.702733, abs=1e-6)

    def test_oov_only_doc_zero_vector(self):
        vocab = fit_vocabulary([doc("a b")])
        fv = vectorize(doc("zz qq"), vocab)
        assert fv.entries == {} and fv.norm == 0.0

    def test_nonzero_vectors_unit_norm(self):
        corpus = [doc("a b c"), doc("a c"), doc("b")]
        vocab = fit_vocabulary(corpus)
        for d in corpus:
            dense = vectorize(d, vocab).dense(len(vocab))
            assert np.linalg.norm(dense) == pytest.approx(1.0, abs=1e-9)

    def test_exhaustive_small_universe_matches_brute_force(self):
        """All corpora up to 3 docs x up to 4 terms from a 6-term universe,
        plus the full 5x6 shapes, against the independent oracle."""
        universe = ["t0", "t1", "t2", "t3", "t4", "t5"]
        rng = np.random.default_rng(99)
        checked = 0
        # exhaustive over tiny doc sets
        small_docs = ["", "t0", "t0 t1", "t1 t1 t2", "t3 t0 t3"]
        for n_docs in (1, 2, 3):
            for combo in itertools.product(small_docs, repeat=n_docs):
                if all(not c for c in combo):
                    continue
                corpus = [doc(c) for c in combo]
                vocab = fit_vocabulary(corpus)
                tokens = [c.split() for c in combo]
                for d, toks in zip(corpus, tokens):
                    expected = brute_force_tfidf(tokens, toks)
                    dense = vectorize(d, vocab).dense(len(vocab))
                    for term, value in expected.items():
                        assert dense[vocab.index(term)] == pytest.approx(value, abs=1e-9)
                    checked += 1
        # randomized 5-doc x 6-term corpora
        for _ in range(200):
            tokens = [
                [universe[rng.integers(0, 6)] for _ in range(rng.integers(1, 8))] for _ in range(5)
            ]
            corpus = [doc(" ".join(toks)) for toks in tokens]
            vocab = fit_vocabulary(corpus)
            for d, toks in zip(corpus, tokens):
                expected = brute_force_tfidf(tokens, toks)
                dense = vectorize(d, vocab).dense(len(vocab))
                for term in vocab.terms:
                    assert dense[vocab.index(term)] == pytest.approx(
                        expected.get(term, 0.0), abs=1e-9
                    )
                checked += 1
        assert checked > 500

    def test_feature_matrix_rows_match_vectorize(self):
        corpus = [doc("a b"), doc("b c"), doc("")]
        vocab = fit_vocabulary(corpus)
        X = feature_matrix(corpus, vocab)
        assert X.shape == (3, len(vocab))
        for i, d in enumerate(corpus):
            assert np.allclose(X[i], vectorize(d, vocab).dense(len(vocab)))

    def test_content_hash_tracks_content(self):
        v1 = fit_vocabulary([doc("a b")])
        v2 = fit_vocabulary([doc("a b")])
        v3 = fit_vocabulary([doc("a b c")])
        assert v1.content_hash == v2.content_hash
        assert v1.content_hash != v3.content_hash
