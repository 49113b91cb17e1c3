"""Error categorization, accuracy breakdowns and review sampling."""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .decoder import SpanPrediction
from .metrics import EvalReport, ScoredExample, aggregate
from .textproc import normalized_sequence
from .types import CharSpan, Document, ParaphrasePair, SpanExample

ERROR_CATEGORIES = (
    "null_prediction",
    "predicted_negative_span",
    "partial_pred_substr_gold",
    "partial_gold_substr_pred",
    "partial_other_overlap",
    "other",
)

TRIVIAL_CATEGORIES = (
    "same_lemmas",
    "same_content_word_lemmas",
    "synonym_replacement",
    "content_lemmas_with_synonyms",
    "non_trivial",
)


class AnalysisError(Exception):
    pass


def build_negative_registry(
    pairs: Iterable[ParaphrasePair],
) -> dict[str, list[CharSpan]]:
    """doc_id -> spans of negative-pair counterparts in that document."""
    registry: dict[str, list[CharSpan]] = defaultdict(list)
    for pair in pairs:
        if not pair.is_negative:
            continue
        registry[pair.side1.doc_id].append(pair.side1.span)
        registry[pair.side2.doc_id].append(pair.side2.span)
    return dict(registry)


def categorize_error(
    prediction: SpanPrediction,
    example: SpanExample,
    document: Document,
    negative_spans: Optional[list[CharSpan]] = None,
) -> str:
    """Assign one category to an incorrect (em = 0) prediction.

    Priority: null prediction, then a prediction matching a known
    negative counterpart span, then the partial-overlap classes, then
    other.
    """
    if prediction.span is None:
        if example.gold_span is None:
            raise AnalysisError(
                f"{example.example_id}: correct null prediction is not an error"
            )
        return "null_prediction"
    pred_tokens = normalized_sequence(prediction.text or document.slice(prediction.span))
    for neg in negative_spans or ():
        if pred_tokens == normalized_sequence(document.slice(neg)):
            return "predicted_negative_span"
    if example.gold_span is None:
        # Setup 2: predicted a span where none exists
        return "other"
    gold_tokens = normalized_sequence(document.slice(example.gold_span))
    if pred_tokens == gold_tokens:
        raise AnalysisError(
            f"{example.example_id}: prediction is correct, not an error"
        )
    if _proper_contiguous_subseq(pred_tokens, gold_tokens):
        return "partial_pred_substr_gold"
    if _proper_contiguous_subseq(gold_tokens, pred_tokens):
        return "partial_gold_substr_pred"
    if prediction.span.overlaps(example.gold_span):
        return "partial_other_overlap"
    return "other"


def _proper_contiguous_subseq(needle: list[str], haystack: list[str]) -> bool:
    if not needle or len(needle) >= len(haystack):
        return False
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return True
    return False


def error_distribution(
    categories: Iterable[str],
) -> dict[str, float]:
    """Category -> percentage of all errors; empty when there are none."""
    counts = Counter(categories)
    total = sum(counts.values())
    if total == 0:
        return {}
    return {cat: 100.0 * counts[cat] / total for cat in counts}


def label_bucket(example: SpanExample) -> str:
    """Partition key following the corpus annotation scheme."""
    label = example.meta.label
    if label is None:
        return "negative"
    if label.base == "context_dependent":
        return "context_dependent"
    if "subsumption" in label.flags:
        return "context_independent_subsumption"
    if "style" in label.flags:
        return "context_independent_style"
    if "minor_difference" in label.flags:
        return "context_independent_minor"
    return "context_independent"


def breakdown_by_label(
    scored: Iterable[ScoredExample],
    examples: Mapping[str, SpanExample],
) -> dict[str, EvalReport]:
    groups: dict[str, list[ScoredExample]] = defaultdict(list)
    for s in scored:
        groups[label_bucket(examples[s.example_id])].append(s)
    return {key: aggregate(group) for key, group in groups.items()}


def domain_split_eval(
    scored: Iterable[ScoredExample],
    examples: Mapping[str, SpanExample],
) -> dict[str, EvalReport]:
    groups: dict[str, list[ScoredExample]] = defaultdict(list)
    for s in scored:
        groups[examples[s.example_id].meta.genre or "unknown"].append(s)
    return {key: aggregate(group) for key, group in groups.items()}


# -- trivial-paraphrase classification --------------------------------------


@dataclass(frozen=True)
class LexicalResources:
    lemma_table: Mapping[str, str]
    synonym_canon: Mapping[str, str]  # lemma -> canonical class representative
    stop_lemmas: frozenset[str]

    def lemma(self, token: str) -> str:
        return self.lemma_table.get(token, token)

    def canon(self, lemma: str) -> str:
        return self.synonym_canon.get(lemma, lemma)


def load_resources(
    lemma_path: str | Path,
    synonym_path: str | Path,
    stop_path: str | Path,
) -> LexicalResources:
    """Load TSV lemma table, TSV synonym pairs and a stop-lemma list.

    The symmetric-transitive closure of the synonym pairs is applied at
    load; each class maps to its lexicographically smallest member.
    """
    lemma_table: dict[str, str] = {}
    for line in _lines(lemma_path):
        surface, lemma = line.split("\t")
        lemma_table[surface] = lemma
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for line in _lines(synonym_path):
        a, b = line.split("\t")
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    canon = {x: find(x) for x in list(parent)}
    stop = frozenset(_lines(stop_path))
    return LexicalResources(
        lemma_table=lemma_table, synonym_canon=canon, stop_lemmas=stop
    )


def _lines(path: str | Path) -> list[str]:
    path = Path(path)
    if not path.exists():
        raise AnalysisError(f"missing resource file {path}")
    out = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            out.append(raw)
    return out


def classify_trivial(
    query: str,
    gold: str,
    resources: LexicalResources,
) -> str:
    """Classify a pair into one of the trivial-paraphrase categories.

    Reductions are tried in order: same lemma multisets; same content
    lemma multisets; same lemmas after synonym-class collapsing; same
    content lemmas after collapsing; otherwise non_trivial.
    """
    q = [resources.lemma(t) for t in normalized_sequence(query)]
    g = [resources.lemma(t) for t in normalized_sequence(gold)]
    if Counter(q) == Counter(g):
        return "same_lemmas"
    qc = [t for t in q if t not in resources.stop_lemmas]
    gc = [t for t in g if t not in resources.stop_lemmas]
    if Counter(qc) == Counter(gc):
        return "same_content_word_lemmas"
    if Counter(map(resources.canon, q)) == Counter(map(resources.canon, g)):
        return "synonym_replacement"
    if Counter(map(resources.canon, qc)) == Counter(map(resources.canon, gc)):
        return "content_lemmas_with_synonyms"
    return "non_trivial"


# -- review sampling --------------------------------------------------------


@dataclass
class ReviewSample:
    rows: list[dict]
    truncated: bool  # k exceeded the population


def sample_for_review(
    candidates: list[dict],
    k: int,
    seed: int,
) -> ReviewSample:
    """Seeded, reproducible sample of review rows.

    Candidates are ordered by example_id before sampling so the result
    is independent of input order.
    """
    if k < 0:
        raise AnalysisError("k must be >= 0")
    ordered = sorted(candidates, key=lambda r: r["example_id"])
    if k >= len(ordered):
        return ReviewSample(rows=ordered, truncated=k > len(ordered))
    rng = random.Random(seed)
    return ReviewSample(rows=rng.sample(ordered, k), truncated=False)


def review_row(
    prediction: SpanPrediction,
    example: SpanExample,
    document: Document,
    context_chars: int = 200,
) -> dict:
    gold_text = (
        document.slice(example.gold_span) if example.gold_span else None
    )
    anchor = prediction.span or example.gold_span or CharSpan(0, 1)
    lo = max(0, anchor.start - context_chars)
    hi = min(len(document.text), anchor.end + context_chars)
    return {
        "example_id": example.example_id,
        "query": example.query,
        "prediction": prediction.text or None,
        "gold": gold_text,
        "context_excerpt": document.text[lo:hi],
    }
