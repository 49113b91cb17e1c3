"""Corpus ingestion and conversion into span-detection examples.

Two input formats are supported:

* ``native`` — the toolkit's own JSONL schema: one object per pair
  ``{pair_id, label:{base,flags[],subsumption_direction?}, is_negative,
  split, side1:{doc_id,start,end,text}, side2:{...}}`` with documents in
  a sibling JSONL ``{doc_id, genre, text}``.
* ``turku`` — importer for the published corpus release, mapping its
  numeric label scheme (4/3/2 with <, >, i, s qualifiers) onto the
  native label model. Pairs lacking document context or carrying
  rewrites are skipped with a counted reason.

All character offsets are Unicode scalar positions.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .jsonl import MalformedRecord, read_jsonl
from .types import (
    CharSpan,
    Document,
    ExampleMeta,
    ParaphraseLabel,
    PairSide,
    ParaphrasePair,
    SpanExample,
)


class CorpusError(Exception):
    pass


@dataclass
class RecordError:
    path: str
    lineno: int
    pair_id: Optional[str]
    message: str


@dataclass
class Corpus:
    pairs: list[ParaphrasePair]
    documents: dict[str, Document]
    errors: list[RecordError] = field(default_factory=list)
    skip_reasons: Counter = field(default_factory=Counter)

    @property
    def positives(self) -> list[ParaphrasePair]:
        return [p for p in self.pairs if not p.is_negative]

    @property
    def negatives(self) -> list[ParaphrasePair]:
        return [p for p in self.pairs if p.is_negative]


def load_documents(path: str | Path) -> dict[str, Document]:
    docs: dict[str, Document] = {}
    for lineno, obj in read_jsonl(path):
        try:
            doc = Document(
                doc_id=str(obj["doc_id"]),
                text=obj["text"],
                genre=obj.get("genre", ""),
            )
        except (KeyError, ValueError) as e:
            raise MalformedRecord(path, lineno, f"bad document record: {e}")
        if doc.doc_id in docs:
            raise MalformedRecord(path, lineno, f"duplicate doc_id {doc.doc_id!r}")
        docs[doc.doc_id] = doc
    return docs


def load_corpus(
    pairs_path: str | Path,
    docs_path: str | Path,
    format: str = "native",
) -> Corpus:
    """Load and validate a paraphrase corpus.

    Records violating the schema or whose span text does not match the
    document slice are rejected individually; the rest of the file still
    loads. Rejections are returned in ``Corpus.errors``.
    """
    if format == "native":
        return _load_native(pairs_path, docs_path)
    if format == "turku":
        return _load_turku(pairs_path, docs_path)
    raise CorpusError(f"unknown corpus format {format!r}")


def _load_native(pairs_path, docs_path) -> Corpus:
    documents = load_documents(docs_path)
    pairs: list[ParaphrasePair] = []
    errors: list[RecordError] = []
    seen: set[str] = set()
    for lineno, obj in read_jsonl(pairs_path):
        pair_id = obj.get("pair_id")
        try:
            pair = _parse_native_pair(obj)
            if pair.pair_id in seen:
                raise CorpusError(f"duplicate pair_id {pair.pair_id!r}")
            _check_sides(pair, documents)
        except (CorpusError, KeyError, TypeError, ValueError) as e:
            errors.append(RecordError(str(pairs_path), lineno, pair_id, str(e)))
            continue
        seen.add(pair.pair_id)
        pairs.append(pair)
    return Corpus(pairs=pairs, documents=documents, errors=errors)


def _parse_native_pair(obj: dict) -> ParaphrasePair:
    is_negative = bool(obj.get("is_negative", False))
    label_obj = obj.get("label")
    label = ParaphraseLabel.from_json(label_obj) if label_obj else None
    return ParaphrasePair(
        pair_id=str(obj["pair_id"]),
        side1=_parse_side(obj["side1"]),
        side2=_parse_side(obj["side2"]),
        split=obj["split"],
        is_negative=is_negative,
        label=label,
    )


def _parse_side(obj: dict) -> PairSide:
    return PairSide(
        doc_id=str(obj["doc_id"]),
        span=CharSpan(int(obj["start"]), int(obj["end"])),
        text=obj["text"],
    )


def _check_sides(pair: ParaphrasePair, documents: dict[str, Document]) -> None:
    for name, side in (("side1", pair.side1), ("side2", pair.side2)):
        doc = documents.get(side.doc_id)
        if doc is None:
            raise CorpusError(f"{name}: unknown doc_id {side.doc_id!r}")
        sliced = doc.slice(side.span)
        if sliced != side.text:
            raise CorpusError(
                f"{name}: span text mismatch at {side.span.to_json()}: "
                f"document has {sliced!r}, record has {side.text!r}"
            )


# -- Turku release importer -------------------------------------------------

_TURKU_SPLITS = {"train": "train", "dev": "devel", "devel": "devel", "test": "test"}


def _turku_label(raw: str) -> tuple[bool, Optional[ParaphraseLabel]]:
    """Map a release label string (e.g. "4", "4<", "4is", "3", "2")."""
    raw = raw.strip()
    base = raw[:1]
    quals = raw[1:]
    if base == "2":
        return True, None
    if base == "3":
        return False, ParaphraseLabel(base="context_dependent")
    if base == "4":
        flags = set()
        direction = None
        for q in quals:
            if q == "i":
                flags.add("minor_difference")
            elif q == "s":
                flags.add("style")
            elif q == ">":
                flags.add("subsumption")
                direction = "left_subsumes_right"
            elif q == "<":
                flags.add("subsumption")
                direction = "right_subsumes_left"
            else:
                raise CorpusError(f"unknown label qualifier {q!r} in {raw!r}")
        return False, ParaphraseLabel(
            base="context_independent",
            flags=frozenset(flags),
            subsumption_direction=direction,
        )
    raise CorpusError(f"unsupported label {raw!r}")


def _load_turku(pairs_path, docs_path) -> Corpus:
    documents = load_documents(docs_path)
    pairs: list[ParaphrasePair] = []
    errors: list[RecordError] = []
    skips: Counter = Counter()
    seen: set[str] = set()
    for lineno, obj in read_jsonl(pairs_path):
        pair_id = obj.get("id") or obj.get("pair_id")
        # rewritten pairs no longer fit their context verbatim
        if obj.get("rew1") or obj.get("rew2"):
            skips["rewritten"] += 1
            continue
        ctx1, ctx2 = obj.get("context1"), obj.get("context2")
        if not ctx1 or not ctx2:
            skips["missing_context"] += 1
            continue
        try:
            is_negative, label = _turku_label(str(obj["label"]))
            split = _TURKU_SPLITS[obj.get("fold", obj.get("split"))]
            pair = ParaphrasePair(
                pair_id=str(pair_id),
                side1=PairSide(
                    doc_id=str(ctx1["doc_id"]),
                    span=CharSpan(int(ctx1["beg"]), int(ctx1["end"])),
                    text=obj["txt1"],
                ),
                side2=PairSide(
                    doc_id=str(ctx2["doc_id"]),
                    span=CharSpan(int(ctx2["beg"]), int(ctx2["end"])),
                    text=obj["txt2"],
                ),
                split=split,
                is_negative=is_negative,
                label=label,
            )
            if pair.pair_id in seen:
                raise CorpusError(f"duplicate pair_id {pair.pair_id!r}")
            _check_sides(pair, documents)
        except (CorpusError, KeyError, TypeError, ValueError) as e:
            errors.append(RecordError(str(pairs_path), lineno, pair_id, str(e)))
            continue
        seen.add(pair.pair_id)
        pairs.append(pair)
    return Corpus(pairs=pairs, documents=documents, errors=errors, skip_reasons=skips)


# -- conversion -------------------------------------------------------------


def convert_to_examples(
    pairs: Iterable[ParaphrasePair],
    documents: dict[str, Document],
    setup: int,
) -> list[SpanExample]:
    """Turn pairs into directed examples.

    Setup 1 emits two retrievable examples per positive pair. Setup 2
    additionally emits two irretrievable examples (no gold span) per
    negative pair. Order follows the input pair order.
    """
    if setup not in (1, 2):
        raise ValueError(f"setup must be 1 or 2, got {setup}")
    examples: list[SpanExample] = []
    for pair in pairs:
        if pair.is_negative and setup == 1:
            continue
        for direction, query_side, ctx_side in (
            ("1to2", pair.side1, pair.side2),
            ("2to1", pair.side2, pair.side1),
        ):
            ctx_doc = documents[ctx_side.doc_id]
            examples.append(
                SpanExample(
                    example_id=f"{pair.pair_id}#{direction}",
                    query=query_side.text,
                    context_doc_id=ctx_side.doc_id,
                    gold_span=None if pair.is_negative else ctx_side.span,
                    direction=direction,
                    meta=ExampleMeta(
                        label=pair.label,
                        genre=ctx_doc.genre,
                        split=pair.split,
                    ),
                )
            )
    return examples


def split_counts(examples: Iterable[SpanExample]) -> dict[str, int]:
    counts = {"train": 0, "devel": 0, "test": 0}
    for ex in examples:
        if ex.meta.split not in counts:
            raise CorpusError(
                f"example {ex.example_id!r} has unknown split {ex.meta.split!r}"
            )
        counts[ex.meta.split] += 1
    return counts


def read_examples(path: str | Path) -> list[SpanExample]:
    return [SpanExample.from_json(obj) for _, obj in read_jsonl(path)]
