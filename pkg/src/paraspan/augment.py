"""Training-set augmentation: artificial irretrievables and
back-translation example building with filters and sampling strategies."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .baselines import TfIdfModel, _sparse_cosine
from .textproc import normalized_sequence, split_sentences, tokenize
from .types import CharSpan, Document, ExampleMeta, SpanExample

MAX_TARGET_WORDS = 100
MAX_BT_SUBWORDS = 380
SUBWORDS_PER_WORD = 1.5  # fallback when the translation adapter gave no count
TFIDF_BAND = (0.35, 0.66)  # inclusive on both ends


class AugmentError(Exception):
    pass


@dataclass(frozen=True)
class BackTranslationRecord:
    source_doc_id: str
    original_text: str
    original_span: CharSpan
    back_translation: str
    word_count: int
    subword_count: Optional[int] = None

    def effective_subwords(self) -> int:
        if self.subword_count is not None:
            return self.subword_count
        return round(self.word_count * SUBWORDS_PER_WORD)

    def to_json(self) -> dict:
        out = {
            "source_doc_id": self.source_doc_id,
            "original": {
                "start": self.original_span.start,
                "end": self.original_span.end,
                "text": self.original_text,
            },
            "back_translation": self.back_translation,
            "word_count": self.word_count,
        }
        if self.subword_count is not None:
            out["subword_count"] = self.subword_count
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BackTranslationRecord":
        orig = obj["original"]
        return cls(
            source_doc_id=obj["source_doc_id"],
            original_text=orig["text"],
            original_span=CharSpan(orig["start"], orig["end"]),
            back_translation=obj["back_translation"],
            word_count=obj["word_count"],
            subword_count=obj.get("subword_count"),
        )


def make_artificial_irretrievable(
    example: SpanExample,
    document: Document,
) -> tuple[SpanExample, Document]:
    """Excise the gold span from the document, yielding a null example.

    Returns the new example plus the modified document (with a derived
    doc_id); the caller keeps the original example alongside.
    """
    if example.gold_span is None:
        raise AugmentError(f"{example.example_id}: no gold span to excise")
    gs = example.gold_span
    left = document.text[: gs.start].rstrip()
    right = document.text[gs.end :].lstrip()
    if not left and not right:
        raise AugmentError(
            f"{example.example_id}: gold span covers the whole document"
        )
    sep = " " if left and right else ""
    new_doc = Document(
        doc_id=f"{document.doc_id}#excised:{example.example_id}",
        text=left + sep + right,
        genre=document.genre,
    )
    new_example = replace(
        example,
        example_id=f"{example.example_id}#irretrievable",
        context_doc_id=new_doc.doc_id,
        gold_span=None,
        meta=ExampleMeta(label=None, genre=example.meta.genre, split=example.meta.split),
    )
    return new_example, new_doc


def double_with_irretrievables(
    examples: Iterable[SpanExample],
    documents: dict[str, Document],
) -> tuple[list[SpanExample], dict[str, Document]]:
    """Each retrievable example appears twice: original + excised copy."""
    out: list[SpanExample] = []
    new_docs = dict(documents)
    for ex in examples:
        out.append(ex)
        irr, doc = make_artificial_irretrievable(ex, documents[ex.context_doc_id])
        new_docs[doc.doc_id] = doc
        out.append(irr)
    return out, new_docs


@dataclass(frozen=True)
class TargetSentence:
    doc_id: str
    span: CharSpan
    text: str


def sample_targets(
    documents: Iterable[Document],
    seed: int,
) -> list[TargetSentence]:
    """One random sentence per document, seeded.

    Documents whose sampled sentence exceeds 100 word tokens are dropped
    entirely; documents without sentences raise.
    """
    rng = random.Random(seed)
    out: list[TargetSentence] = []
    for doc in documents:
        sentences = split_sentences(doc.text).sentences
        if not sentences:
            raise AugmentError(f"document {doc.doc_id!r} has no sentences")
        span = rng.choice(sentences)
        text = doc.slice(span)
        n_words = sum(1 for t in tokenize(text).tokens if not t.is_punct)
        if n_words > MAX_TARGET_WORDS:
            continue
        out.append(TargetSentence(doc_id=doc.doc_id, span=span, text=text))
    return out


@dataclass
class FilterResult:
    retained: list[BackTranslationRecord]
    dropped: Counter  # reason -> count


def filter_bt(
    records: Iterable[BackTranslationRecord],
    normalized: bool = True,
) -> FilterResult:
    """Drop empty, identical and over-long back-translations.

    Identity is checked on normalized token sequences by default (raw
    string comparison with normalized=False). The length cap is 380
    subwords, inclusive.
    """
    retained: list[BackTranslationRecord] = []
    dropped: Counter = Counter()
    for rec in records:
        if not rec.back_translation.strip():
            dropped["empty"] += 1
            continue
        if _same_sentence(rec.back_translation, rec.original_text, normalized):
            dropped["identical"] += 1
            continue
        if rec.effective_subwords() > MAX_BT_SUBWORDS:
            dropped["too_long"] += 1
            continue
        retained.append(rec)
    return FilterResult(retained=retained, dropped=dropped)


def _same_sentence(a: str, b: str, normalized: bool) -> bool:
    if normalized:
        return normalized_sequence(a) == normalized_sequence(b)
    return a == b


@dataclass
class SampledExamples:
    examples: list[SpanExample]
    short_of_target: bool  # fewer qualifying records than requested


def _record_key(rec: BackTranslationRecord) -> tuple:
    return (rec.source_doc_id, rec.original_span.start, rec.original_span.end)


def bt_example(rec: BackTranslationRecord, split: str = "train",
               genre: str = "") -> SpanExample:
    return SpanExample(
        example_id=(
            f"bt:{rec.source_doc_id}:"
            f"{rec.original_span.start}-{rec.original_span.end}"
        ),
        query=rec.back_translation,
        context_doc_id=rec.source_doc_id,
        gold_span=rec.original_span,
        direction="1to2",
        meta=ExampleMeta(label=None, genre=genre, split=split),
    )


def sample_strategy(
    records: list[BackTranslationRecord],
    strategy: str,
    n: int,
    tfidf_model: Optional[TfIdfModel] = None,
    seed: int = 0,
) -> SampledExamples:
    """Pick n back-translation training examples by the named strategy.

    random: uniform sample. tfidf_band: restrict to query-target tf-idf
    similarity in [0.35, 0.66] (inclusive), then sample. tfidf_most_
    dissimilar: the n lowest-similarity records, input-order independent.
    """
    if n <= 0:
        raise AugmentError("target count must be positive")
    pool = sorted(records, key=_record_key)
    if strategy in ("tfidf_band", "tfidf_most_dissimilar"):
        if tfidf_model is None:
            raise AugmentError(f"strategy {strategy!r} requires a tf-idf model")
        sims = [
            _sparse_cosine(
                tfidf_model.vectorize(r.back_translation),
                tfidf_model.vectorize(r.original_text),
            )
            for r in pool
        ]
    if strategy == "random":
        chosen = _seeded_sample(pool, n, seed)
    elif strategy == "tfidf_band":
        lo, hi = TFIDF_BAND
        banded = [r for r, s in zip(pool, sims) if lo <= s <= hi]
        chosen = _seeded_sample(banded, n, seed)
    elif strategy == "tfidf_most_dissimilar":
        ranked = sorted(zip(pool, sims), key=lambda rs: (rs[1], _record_key(rs[0])))
        chosen = [r for r, _ in ranked[:n]]
    else:
        raise AugmentError(f"unknown strategy {strategy!r}")
    return SampledExamples(
        examples=[bt_example(r) for r in chosen],
        short_of_target=len(chosen) < n,
    )


def _seeded_sample(pool: list, n: int, seed: int) -> list:
    if n >= len(pool):
        return list(pool)
    return random.Random(seed).sample(pool, n)
