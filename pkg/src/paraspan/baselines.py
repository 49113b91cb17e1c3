"""Sentence-level retrieval baselines and the sentence oracle.

The tf-idf baseline vectorizes sentences with within-word character
n-grams (no boundary markers, n-grams never cross whitespace), raw term
counts and smoothed idf, L2-normalized. The embedding baseline consumes
externally produced dense vectors through a key -> vector source.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .textproc import SentenceIndex, tokenize
from .types import CharSpan, Document

MODEL_FORMAT_VERSION = 1


class BaselineError(Exception):
    pass


@dataclass(frozen=True)
class TfIdfConfig:
    ngram_lengths: tuple[int, ...] = (2, 3, 4)
    max_features: int = 300_000
    within_word: bool = True
    lowercase: bool = True


@dataclass
class TfIdfModel:
    vocabulary: dict[str, int]  # n-gram -> feature index
    idf: np.ndarray  # per feature index
    config: TfIdfConfig = field(default_factory=TfIdfConfig)

    def vectorize(self, text: str) -> dict[int, float]:
        """Sparse L2-normalized tf-idf vector; unseen n-grams are ignored."""
        counts: Counter = Counter()
        for gram in char_ngrams(text, self.config):
            idx = self.vocabulary.get(gram)
            if idx is not None:
                counts[idx] += 1
        vec = {i: c * float(self.idf[i]) for i, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm == 0.0:
            return {}
        return {i: w / norm for i, w in vec.items()}

    def save(self, path: str | Path) -> None:
        from .jsonl import write_json

        write_json(
            path,
            {
                "format_version": MODEL_FORMAT_VERSION,
                "config": {
                    "ngram_lengths": list(self.config.ngram_lengths),
                    "max_features": self.config.max_features,
                    "within_word": self.config.within_word,
                    "lowercase": self.config.lowercase,
                },
                "vocabulary": self.vocabulary,
                "idf": [float(x) for x in self.idf],
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> "TfIdfModel":
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
        if obj.get("format_version") != MODEL_FORMAT_VERSION:
            raise BaselineError(
                f"unsupported model format version {obj.get('format_version')}"
            )
        cfg = obj["config"]
        return cls(
            vocabulary=obj["vocabulary"],
            idf=np.asarray(obj["idf"], dtype=float),
            config=TfIdfConfig(
                ngram_lengths=tuple(cfg["ngram_lengths"]),
                max_features=cfg["max_features"],
                within_word=cfg["within_word"],
                lowercase=cfg.get("lowercase", True),
            ),
        )


def char_ngrams(text: str, config: TfIdfConfig) -> Iterable[str]:
    """Character n-grams of the configured lengths.

    With within_word=True the grams are taken inside whitespace-separated
    chunks only, with no boundary padding.
    """
    if config.lowercase:
        text = text.lower()
    chunks = text.split() if config.within_word else [text]
    for chunk in chunks:
        for n in config.ngram_lengths:
            for i in range(len(chunk) - n + 1):
                yield chunk[i : i + n]


def fit_tfidf(
    training_sentences: Iterable[str],
    config: TfIdfConfig = TfIdfConfig(),
) -> TfIdfModel:
    """Induce the n-gram vocabulary and idf weights on training data only.

    When the vocabulary exceeds max_features, the highest-document-
    frequency features are kept, ties broken lexicographically.
    """
    df: Counter = Counter()
    n_sentences = 0
    for sent in training_sentences:
        n_sentences += 1
        df.update(set(char_ngrams(sent, config)))
    if n_sentences == 0:
        raise BaselineError("empty training set")
    features = sorted(df, key=lambda g: (-df[g], g))[: config.max_features]
    features.sort()
    vocabulary = {gram: i for i, gram in enumerate(features)}
    idf = np.array(
        [math.log((1 + n_sentences) / (1 + df[g])) + 1.0 for g in features],
        dtype=float,
    )
    return TfIdfModel(vocabulary=vocabulary, idf=idf, config=config)


@dataclass(frozen=True)
class Retrieval:
    sentence_span: CharSpan
    similarity: float


def _sparse_cosine(a: dict[int, float], b: dict[int, float]) -> float:
    if len(a) > len(b):
        a, b = b, a
    return sum(w * b.get(i, 0.0) for i, w in a.items())


def retrieve_tfidf(
    model: TfIdfModel,
    query: str,
    document: Document,
    sentence_index: SentenceIndex,
) -> Retrieval:
    """Most similar document sentence by tf-idf cosine; ties to earliest."""
    if not sentence_index.sentences:
        raise BaselineError(f"document {document.doc_id!r} has no sentences")
    qvec = model.vectorize(query)
    best_span = None
    best_sim = -1.0
    for span in sentence_index.sentences:
        sim = _sparse_cosine(qvec, model.vectorize(document.slice(span)))
        if sim > best_sim:
            best_span, best_sim = span, sim
    return Retrieval(sentence_span=best_span, similarity=max(best_sim, 0.0))


class EmbeddingSource:
    """Key -> dense vector lookup backed by an embedding JSONL file."""

    def __init__(self, vectors: Mapping[str, np.ndarray]):
        self._vectors = dict(vectors)

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "EmbeddingSource":
        from .jsonl import read_jsonl

        vectors = {}
        for _, obj in read_jsonl(path):
            vectors[obj["key"]] = np.asarray(obj["vector"], dtype=float)
        return cls(vectors)

    def vector(self, key: str) -> np.ndarray:
        try:
            return self._vectors[key]
        except KeyError:
            raise BaselineError(f"missing embedding for key {key!r}") from None


def retrieve_embedding(
    embeddings: EmbeddingSource,
    query: str,
    document: Document,
    sentence_index: SentenceIndex,
) -> Retrieval:
    """Most similar sentence by embedding cosine, keyed by surface text."""
    if not sentence_index.sentences:
        raise BaselineError(f"document {document.doc_id!r} has no sentences")
    qvec = embeddings.vector(query)
    best_span = None
    best_sim = -2.0
    for span in sentence_index.sentences:
        svec = embeddings.vector(document.slice(span))
        sim = _cosine(qvec, svec)
        if sim > best_sim:
            best_span, best_sim = span, sim
    return Retrieval(sentence_span=best_span, similarity=best_sim)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def oracle_sentence(
    document: Document,
    sentence_index: SentenceIndex,
    gold_span: CharSpan,
) -> CharSpan:
    """Sentence most overlapping the gold span, by shared non-punctuation
    token count; ties break to the earliest sentence."""
    if not sentence_index.sentences:
        raise BaselineError(f"document {document.doc_id!r} has no sentences")
    tokens = [
        t for t in tokenize(document.text).tokens
        if not t.is_punct and t.char_span.overlaps(gold_span)
    ]
    best_span = sentence_index.sentences[0]
    best_count = -1
    for span in sentence_index.sentences:
        count = sum(1 for t in tokens if span.contains(t.char_span))
        if count > best_count:
            best_span, best_count = span, count
    return best_span
