"""Slicing of long documents into overlapping windows of slicing units.

A "unit" is whatever offset map is in play: subword offsets reported by
an external scorer, or word tokens from textproc as a fallback. The
query phrase is never sliced or truncated; its unit cost is charged
against the sequence budget.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional

from .textproc import tokenize
from .types import CharSpan, SpanExample


class SlicingError(Exception):
    pass


@dataclass(frozen=True)
class UnitMap:
    """Ordered, non-overlapping character spans, one per slicing unit."""

    spans: tuple[CharSpan, ...]
    kind: str = "fallback_word"  # or "scorer_subword"

    def __len__(self) -> int:
        return len(self.spans)

    def char_to_unit(self, pos: int) -> int:
        """Index of the unit covering (or the first unit at/after) pos."""
        starts = [s.start for s in self.spans]
        i = bisect.bisect_right(starts, pos) - 1
        if i >= 0 and self.spans[i].end > pos:
            return i
        return min(i + 1, len(self.spans) - 1)

    def covering_units(self, span: CharSpan) -> tuple[int, int]:
        """Half-open unit range [first, last) of units overlapping span."""
        first = None
        last = None
        for i, u in enumerate(self.spans):
            if u.overlaps(span):
                if first is None:
                    first = i
                last = i + 1
        if first is None:
            raise SlicingError(f"span {span.to_json()} covers no unit")
        return first, last


def unit_map_from_scorer(offsets: list[CharSpan] | list[tuple[int, int]],
                         kind: str = "scorer_subword") -> UnitMap:
    """Build a unit map from scorer-provided (or word-token) offsets."""
    if not offsets:
        raise SlicingError("empty offset list")
    spans = tuple(
        o if isinstance(o, CharSpan) else CharSpan(o[0], o[1]) for o in offsets
    )
    prev_end = -1
    for s in spans:
        if s.start < prev_end:
            raise SlicingError(f"overlapping or unordered offsets at {s.to_json()}")
        prev_end = s.end
    return UnitMap(spans, kind=kind)


def word_unit_map(text: str) -> UnitMap:
    toks = tokenize(text).tokens
    if not toks:
        raise SlicingError("document has no tokens")
    return UnitMap(tuple(t.char_span for t in toks), kind="fallback_word")


@dataclass(frozen=True)
class SlicingBudget:
    max_sequence_units: int = 512
    query_units: int = 0
    reserved_special_units: int = 3

    @property
    def window(self) -> int:
        return self.max_sequence_units - self.query_units - self.reserved_special_units


@dataclass(frozen=True)
class Slice:
    slice_index: int
    unit_range: tuple[int, int]  # [start_unit, end_unit)
    char_span: CharSpan
    gold_in_slice: Optional[tuple[int, int]] = None  # slice-local unit span


@dataclass(frozen=True)
class SliceSet:
    example_id: str
    slices: tuple[Slice, ...]
    unit_kind: str
    window: int
    overlap: int


def slice_document(
    example: SpanExample,
    units: UnitMap,
    budget: SlicingBudget,
    overlap: int = 128,
) -> SliceSet:
    """Slice one context document into overlapping unit windows.

    Slice i starts at unit i * (window - overlap); the last slice ends at
    the final unit. A gold span is attached to a slice only when it lies
    entirely inside that slice (partially covered slices are null-labeled
    training instances).
    """
    window = budget.window
    if window <= overlap:
        raise SlicingError(
            f"query of {budget.query_units} units leaves window {window} "
            f"<= overlap {overlap} under max_sequence_units "
            f"{budget.max_sequence_units}"
        )
    n = len(units)
    if n == 0:
        raise SlicingError("empty document")

    gold_units: Optional[tuple[int, int]] = None
    if example.gold_span is not None:
        gold_units = units.covering_units(example.gold_span)

    stride = window - overlap
    slices: list[Slice] = []
    start = 0
    index = 0
    while True:
        end = min(start + window, n)
        gold_local = None
        if gold_units is not None:
            g0, g1 = gold_units
            if start <= g0 and g1 <= end:
                gold_local = (g0 - start, g1 - start)
        slices.append(
            Slice(
                slice_index=index,
                unit_range=(start, end),
                char_span=CharSpan(units.spans[start].start, units.spans[end - 1].end),
                gold_in_slice=gold_local,
            )
        )
        if end >= n:
            break
        start += stride
        index += 1
    return SliceSet(
        example_id=example.example_id,
        slices=tuple(slices),
        unit_kind=units.kind,
        window=window,
        overlap=overlap,
    )


def budget_for(example: SpanExample, query_units: int,
               max_sequence_units: int = 512,
               reserved_special_units: int = 3) -> SlicingBudget:
    budget = SlicingBudget(
        max_sequence_units=max_sequence_units,
        query_units=query_units,
        reserved_special_units=reserved_special_units,
    )
    if budget.window <= 0:
        raise SlicingError(
            f"query of {query_units} units exceeds the sequence budget "
            f"({max_sequence_units})"
        )
    return budget


def slice_export_records(slice_set: SliceSet, example: SpanExample,
                         document_text: str) -> list[dict]:
    """Rows of the slice-export JSONL consumed by the external scorer."""
    out = []
    for sl in slice_set.slices:
        rec = {
            "example_id": slice_set.example_id,
            "slice_index": sl.slice_index,
            "query": example.query,
            "context_text": document_text[sl.char_span.start:sl.char_span.end],
            "context_char_span": sl.char_span.to_json(),
        }
        if sl.gold_in_slice is not None:
            rec["gold_local_span"] = list(sl.gold_in_slice)
        out.append(rec)
    return out
