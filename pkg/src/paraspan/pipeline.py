"""Glue between modules: end-to-end runs over example collections."""
from __future__ import annotations

from typing import Iterable, Optional

from .baselines import (
    EmbeddingSource,
    TfIdfModel,
    oracle_sentence,
    retrieve_embedding,
    retrieve_tfidf,
)
from .decoder import (
    DecodeRun,
    LogitSheet,
    SpanPrediction,
    decode_all,
    mock_lexical_scorer,
)
from .metrics import ScoredExample, aggregate, score_example
from .textproc import split_sentences
from .types import Document, SpanExample
from .windowing import budget_for, slice_document, word_unit_map


def score_predictions(
    predictions: Iterable[SpanPrediction],
    examples: dict[str, SpanExample],
    documents: dict[str, Document],
    normalized: bool = True,
) -> list[ScoredExample]:
    scored = []
    for pred in predictions:
        ex = examples[pred.example_id]
        doc = documents[ex.context_doc_id]
        gold = doc.slice(ex.gold_span) if ex.gold_span else None
        pred_text = None
        if pred.span is not None:
            pred_text = pred.text or doc.slice(pred.span)
        scored.append(
            score_example(pred.example_id, pred_text, gold, normalized=normalized)
        )
    return scored


def build_report(
    scored: list[ScoredExample],
    examples: dict[str, SpanExample],
    config_hash: str = "",
) -> dict:
    from .analysis import breakdown_by_label, domain_split_eval

    report = {
        "config_hash": config_hash,
        "overall": aggregate(scored).to_json(),
        "by_label": {
            k: v.to_json() for k, v in breakdown_by_label(scored, examples).items()
        },
        "by_genre": {
            k: v.to_json() for k, v in domain_split_eval(scored, examples).items()
        },
    }
    return report


def mock_score_examples(
    examples: Iterable[SpanExample],
    documents: dict[str, Document],
    max_sequence_units: int = 512,
    overlap: int = 128,
    null_bias: float = 0.25,
) -> dict[str, LogitSheet]:
    """Slice with word units and score with the lexical mock scorer."""
    sheets: dict[str, LogitSheet] = {}
    for ex in examples:
        doc = documents[ex.context_doc_id]
        units = word_unit_map(doc.text)
        query_units = len(word_unit_map(ex.query)) if ex.query.strip() else 0
        budget = budget_for(ex, query_units, max_sequence_units=max_sequence_units)
        slice_set = slice_document(ex, units, budget, overlap=overlap)
        sheets[ex.example_id] = mock_lexical_scorer(
            ex, slice_set, doc.text, null_bias=null_bias
        )
    return sheets


def decode_with_mock(
    examples: list[SpanExample],
    documents: dict[str, Document],
    setup: int,
    max_sequence_units: int = 512,
    overlap: int = 128,
    max_span_units: Optional[int] = None,
) -> DecodeRun:
    sheets = mock_score_examples(
        examples, documents, max_sequence_units=max_sequence_units, overlap=overlap
    )
    texts = {d.doc_id: d.text for d in documents.values()}
    return decode_all(
        examples, sheets, texts, setup, max_span_units=max_span_units
    )


def retrieval_predictions(
    method: str,
    examples: Iterable[SpanExample],
    documents: dict[str, Document],
    tfidf_model: Optional[TfIdfModel] = None,
    embeddings: Optional[EmbeddingSource] = None,
) -> list[SpanPrediction]:
    """Sentence-level predictions for {tfidf, embedding, oracle}.

    The oracle requires gold spans and answers the best achievable
    sentence; examples without a gold span yield null predictions.
    """
    sentence_cache: dict[str, object] = {}
    out: list[SpanPrediction] = []
    for ex in sorted(examples, key=lambda e: e.example_id):
        doc = documents[ex.context_doc_id]
        index = sentence_cache.get(doc.doc_id)
        if index is None:
            index = split_sentences(doc.text)
            sentence_cache[doc.doc_id] = index
        if method == "tfidf":
            if tfidf_model is None:
                raise ValueError("tfidf retrieval requires a fitted model")
            r = retrieve_tfidf(tfidf_model, ex.query, doc, index)
            span, score = r.sentence_span, r.similarity
        elif method == "embedding":
            if embeddings is None:
                raise ValueError("embedding retrieval requires an embedding source")
            r = retrieve_embedding(embeddings, ex.query, doc, index)
            span, score = r.sentence_span, r.similarity
        elif method == "oracle":
            if ex.gold_span is None:
                span, score = None, 0.0
            else:
                span = oracle_sentence(doc, index, ex.gold_span)
                score = 1.0
        else:
            raise ValueError(f"unknown retrieval method {method!r}")
        out.append(
            SpanPrediction(
                example_id=ex.example_id,
                span=span,
                score=score,
                null_score=float("-inf") if span is not None else score,
                best_slice=-1,
                text=doc.slice(span) if span is not None else "",
            )
        )
    return out


def training_sentences(
    train_examples: Iterable[SpanExample],
    documents: dict[str, Document],
) -> list[str]:
    """Sentence surfaces of all training context documents plus queries."""
    out: list[str] = []
    seen_docs: set[str] = set()
    for ex in train_examples:
        out.append(ex.query)
        if ex.context_doc_id in seen_docs:
            continue
        seen_docs.add(ex.context_doc_id)
        doc = documents[ex.context_doc_id]
        index = split_sentences(doc.text)
        out.extend(doc.slice(s) for s in index.sentences)
    return out
