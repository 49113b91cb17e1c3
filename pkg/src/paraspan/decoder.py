"""Span selection from per-slice start/end logits.

Decoding follows the extractive-QA convention: every valid (start, end)
pair inside the context region is scored by the sum of its start and end
logits; the null hypothesis is scored at the designated null position.
Per-slice results are merged by taking the best span across slices and
the minimum (least confident) null score across slices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .textproc import normalized_bag
from .types import CharSpan, SpanExample
from .windowing import SliceSet


class DecodeError(Exception):
    pass


@dataclass(frozen=True)
class SheetSlice:
    slice_index: int
    start_logits: tuple[float, ...]  # length = #context units + 1
    end_logits: tuple[float, ...]
    unit_char_spans: tuple[CharSpan, ...]  # per context unit, document offsets
    null_index: int

    def __post_init__(self):
        n = len(self.unit_char_spans) + 1
        if len(self.start_logits) != n or len(self.end_logits) != n:
            raise DecodeError(
                f"slice {self.slice_index}: logit length "
                f"{len(self.start_logits)}/{len(self.end_logits)} != units+1 ({n})"
            )
        if not 0 <= self.null_index < n:
            raise DecodeError(f"slice {self.slice_index}: bad null_index")

    def unit_positions(self) -> list[int]:
        """Logit positions of context units, in unit order."""
        return [p for p in range(len(self.start_logits)) if p != self.null_index]


@dataclass(frozen=True)
class LogitSheet:
    example_id: str
    slices: tuple[SheetSlice, ...]


@dataclass(frozen=True)
class Candidate:
    unit_span: tuple[int, int]  # inclusive (start_unit, end_unit) in the slice
    char_span: CharSpan
    score: float


@dataclass(frozen=True)
class SpanPrediction:
    example_id: str
    span: Optional[CharSpan]
    score: float
    null_score: float
    best_slice: int
    text: str

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "span": self.span.to_json() if self.span else None,
            "score": self.score,
            "null_score": self.null_score,
            "best_slice": self.best_slice,
            "text": self.text,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpanPrediction":
        span = obj.get("span")
        return cls(
            example_id=obj["example_id"],
            span=CharSpan(*span) if span is not None else None,
            score=obj["score"],
            null_score=obj["null_score"],
            best_slice=obj.get("best_slice", 0),
            text=obj.get("text", ""),
        )


def decode_slice(
    sheet_slice: SheetSlice,
    max_span_units: Optional[int] = None,
    top_k: Optional[int] = 1,
) -> tuple[list[Candidate], float]:
    """Rank valid spans of one slice; return (candidates, null_score).

    Valid spans satisfy end >= start, span length <= max_span_units and
    both positions inside the context region. Ties break toward earlier
    start, then shorter span.
    """
    positions = sheet_slice.unit_positions()
    n = len(positions)
    if n == 0:
        raise DecodeError(f"slice {sheet_slice.slice_index}: empty context region")
    start = np.asarray(sheet_slice.start_logits, dtype=float)[positions]
    end = np.asarray(sheet_slice.end_logits, dtype=float)[positions]
    cap = n if max_span_units is None else max(1, min(max_span_units, n))

    scores = start[:, None] + end[None, :]
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    valid = (jj >= ii) & (jj - ii < cap)
    scores = np.where(valid, scores, -np.inf)

    flat = scores.ravel()
    n_valid = int(np.isfinite(flat).sum())
    if top_k is not None and top_k < n_valid:
        # keep everything at or above the k-th best score so that ties are
        # resolved by the deterministic comparator, not by argsort order
        thresh = np.partition(flat, flat.size - top_k)[flat.size - top_k]
        idx = np.flatnonzero(np.isfinite(flat) & (flat >= thresh))
    else:
        idx = np.flatnonzero(np.isfinite(flat))
    pairs = [(int(k // n), int(k % n)) for k in idx]
    pairs.sort(key=lambda se: (-scores[se[0], se[1]], se[0], se[1] - se[0]))
    if top_k is not None:
        pairs = pairs[:top_k]

    spans = sheet_slice.unit_char_spans
    candidates = [
        Candidate(
            unit_span=(s, e),
            char_span=CharSpan(spans[s].start, spans[e].end),
            score=float(scores[s, e]),
        )
        for s, e in pairs
    ]
    null_score = float(
        sheet_slice.start_logits[sheet_slice.null_index]
        + sheet_slice.end_logits[sheet_slice.null_index]
    )
    return candidates, null_score


def merge_slices(
    per_slice: list[tuple[int, list[Candidate], float]],
    setup: int,
    example_id: str = "",
    document_text: str = "",
) -> SpanPrediction:
    """Combine per-slice candidates into one document-level prediction.

    The best span is the argmax of candidate score over all slices; the
    document null score is the minimum over slice null scores. Setup 1
    always returns the best span; Setup 2 returns null iff the null
    score strictly exceeds the best span score (spans win ties).
    """
    if not per_slice:
        raise DecodeError("merge_slices needs at least one slice")
    best: Optional[Candidate] = None
    best_slice = -1
    null_score = min(ns for _, _, ns in per_slice)
    for slice_index, candidates, _ in per_slice:
        for cand in candidates:
            if best is None or _beats(cand, slice_index, best, best_slice):
                best, best_slice = cand, slice_index
    if best is None:
        raise DecodeError("no valid span candidate in any slice")
    if setup == 2 and null_score > best.score:
        return SpanPrediction(
            example_id=example_id,
            span=None,
            score=best.score,
            null_score=null_score,
            best_slice=best_slice,
            text="",
        )
    return SpanPrediction(
        example_id=example_id,
        span=best.char_span,
        score=best.score,
        null_score=null_score,
        best_slice=best_slice,
        text=document_text[best.char_span.start:best.char_span.end]
        if document_text
        else "",
    )


def _beats(cand: Candidate, cand_slice: int, best: Candidate, best_slice: int) -> bool:
    a = (-cand.score, cand.char_span.start, cand.char_span.end, cand_slice)
    b = (-best.score, best.char_span.start, best.char_span.end, best_slice)
    return a < b


def decode_sheet(
    sheet: LogitSheet,
    setup: int,
    max_span_units: Optional[int] = None,
    document_text: str = "",
) -> SpanPrediction:
    per_slice = []
    for sl in sheet.slices:
        candidates, null_score = decode_slice(sl, max_span_units=max_span_units)
        per_slice.append((sl.slice_index, candidates, null_score))
    return merge_slices(
        per_slice, setup, example_id=sheet.example_id, document_text=document_text
    )


@dataclass
class DecodeRun:
    predictions: list[SpanPrediction] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)  # example_ids without sheets


def decode_all(
    examples: Iterable[SpanExample],
    sheets: dict[str, LogitSheet],
    document_texts: dict[str, str],
    setup: int,
    max_span_units: Optional[int] = None,
) -> DecodeRun:
    """Decode every example that has a sheet; count the rest as skipped.

    Output is ordered by example_id regardless of input order.
    """
    run = DecodeRun()
    for ex in sorted(examples, key=lambda e: e.example_id):
        sheet = sheets.get(ex.example_id)
        if sheet is None:
            run.skipped.append(ex.example_id)
            continue
        run.predictions.append(
            decode_sheet(
                sheet,
                setup,
                max_span_units=max_span_units,
                document_text=document_texts.get(ex.context_doc_id, ""),
            )
        )
    return run


# -- interchange format -----------------------------------------------------


def sheet_records(sheet: LogitSheet) -> list[dict]:
    """Rows of the LogitSheet JSONL, one per slice."""
    return [
        {
            "example_id": sheet.example_id,
            "slice_index": sl.slice_index,
            "null_index": sl.null_index,
            "start_logits": list(sl.start_logits),
            "end_logits": list(sl.end_logits),
            "unit_char_spans": [s.to_json() for s in sl.unit_char_spans],
        }
        for sl in sheet.slices
    ]


def read_logit_sheets(path) -> dict[str, LogitSheet]:
    """Load a LogitSheet JSONL, grouping slices by example_id."""
    from .jsonl import read_jsonl

    grouped: dict[str, list[SheetSlice]] = {}
    for _, obj in read_jsonl(path):
        sl = SheetSlice(
            slice_index=int(obj["slice_index"]),
            start_logits=tuple(float(x) for x in obj["start_logits"]),
            end_logits=tuple(float(x) for x in obj["end_logits"]),
            unit_char_spans=tuple(CharSpan(s, e) for s, e in obj["unit_char_spans"]),
            null_index=int(obj["null_index"]),
        )
        grouped.setdefault(obj["example_id"], []).append(sl)
    return {
        ex_id: LogitSheet(
            example_id=ex_id,
            slices=tuple(sorted(slices, key=lambda s: s.slice_index)),
        )
        for ex_id, slices in grouped.items()
    }


# -- deterministic lexical test double --------------------------------------


def mock_lexical_scorer(
    example: SpanExample,
    slice_set: SliceSet,
    document_text: str,
    null_bias: float = 0.25,
) -> LogitSheet:
    """Deterministic stand-in for the neural scorer.

    Start logits reward positions where the following unit window shares
    tokens with the query; end logits reward positions closing such a
    window. Null logits sit at a fixed bias so zero-overlap documents
    decode to null under Setup 2.
    """
    query_tokens = [t for t in normalized_bag(example.query).elements()]
    if not query_tokens:
        raise DecodeError("empty query")
    q = len(query_tokens)
    qbag = normalized_bag(example.query)

    unit_spans_all = _slice_unit_spans(slice_set, document_text)
    sheet_slices = []
    for sl, unit_spans in zip(slice_set.slices, unit_spans_all):
        surfaces = [
            _norm_surface(document_text[s.start:s.end]) for s in unit_spans
        ]
        n = len(unit_spans)
        start = [0.0] * (n + 1)
        end = [0.0] * (n + 1)
        for i in range(n):
            start[i] = _overlap(surfaces[i : i + q], qbag)
            end[i] = _overlap(surfaces[max(0, i - q + 1) : i + 1], qbag)
        start.append(0.0)
        end.append(0.0)
        # null position sits after the context units
        start_logits = tuple(start[:n]) + (null_bias,)
        end_logits = tuple(end[:n]) + (null_bias,)
        sheet_slices.append(
            SheetSlice(
                slice_index=sl.slice_index,
                start_logits=start_logits,
                end_logits=end_logits,
                unit_char_spans=tuple(unit_spans),
                null_index=n,
            )
        )
    return LogitSheet(example_id=example.example_id, slices=tuple(sheet_slices))


def _slice_unit_spans(slice_set: SliceSet, document_text: str) -> list[list[CharSpan]]:
    from .windowing import word_unit_map

    units = word_unit_map(document_text)
    return [
        list(units.spans[sl.unit_range[0]:sl.unit_range[1]])
        for sl in slice_set.slices
    ]


def _norm_surface(surface: str) -> str:
    import unicodedata

    return "".join(
        ch for ch in surface.lower() if not unicodedata.category(ch).startswith("P")
    )


def _overlap(surfaces: list[str], qbag) -> float:
    from collections import Counter

    bag = Counter(s for s in surfaces if s)
    return float(sum((bag & qbag).values()))
