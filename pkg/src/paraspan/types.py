"""Core record types shared across the toolkit."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

SPLITS = ("train", "devel", "test")

LABEL_BASES = ("context_dependent", "context_independent")
LABEL_FLAGS = ("minor_difference", "style", "subsumption")
SUBSUMPTION_DIRECTIONS = ("left_subsumes_right", "right_subsumes_left")


@dataclass(frozen=True, order=True)
class CharSpan:
    """Half-open character range [start, end) in Unicode scalar values."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: "CharSpan") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "CharSpan") -> bool:
        return self.start < other.end and other.start < self.end

    def to_json(self) -> list[int]:
        return [self.start, self.end]


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    genre: str = ""

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"document {self.doc_id!r} has empty text")

    def slice(self, span: CharSpan) -> str:
        if span.end > len(self.text):
            raise ValueError(
                f"span {span} out of range for document {self.doc_id!r} "
                f"of length {len(self.text)}"
            )
        return self.text[span.start:span.end]


@dataclass(frozen=True)
class ParaphraseLabel:
    base: str
    flags: frozenset[str] = frozenset()
    subsumption_direction: Optional[str] = None

    def __post_init__(self):
        if self.base not in LABEL_BASES:
            raise ValueError(f"unknown label base {self.base!r}")
        bad = set(self.flags) - set(LABEL_FLAGS)
        if bad:
            raise ValueError(f"unknown label flags {sorted(bad)}")
        if self.flags and self.base != "context_independent":
            raise ValueError("flags only allowed on context_independent labels")
        if self.subsumption_direction is not None:
            if self.subsumption_direction not in SUBSUMPTION_DIRECTIONS:
                raise ValueError(
                    f"unknown subsumption direction {self.subsumption_direction!r}"
                )
            if "subsumption" not in self.flags:
                raise ValueError("subsumption direction without subsumption flag")

    def to_json(self) -> dict:
        out: dict = {"base": self.base, "flags": sorted(self.flags)}
        if self.subsumption_direction is not None:
            out["subsumption_direction"] = self.subsumption_direction
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ParaphraseLabel":
        return cls(
            base=obj["base"],
            flags=frozenset(obj.get("flags", ())),
            subsumption_direction=obj.get("subsumption_direction"),
        )


@dataclass(frozen=True)
class PairSide:
    doc_id: str
    span: CharSpan
    text: str


@dataclass(frozen=True)
class ParaphrasePair:
    pair_id: str
    side1: PairSide
    side2: PairSide
    split: str
    is_negative: bool = False
    label: Optional[ParaphraseLabel] = None

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")
        if self.is_negative and self.label is not None:
            raise ValueError("negative pairs carry no label")
        if not self.is_negative and self.label is None:
            raise ValueError("positive pairs require a label")


@dataclass(frozen=True)
class ExampleMeta:
    label: Optional[ParaphraseLabel]
    genre: str
    split: str


@dataclass(frozen=True)
class SpanExample:
    """One directed retrieval instance: find `query` inside the context doc."""

    example_id: str
    query: str
    context_doc_id: str
    gold_span: Optional[CharSpan]
    direction: str  # "1to2" or "2to1"
    meta: ExampleMeta = field(
        default_factory=lambda: ExampleMeta(None, "", "train")
    )

    @property
    def retrievable(self) -> bool:
        return self.gold_span is not None

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "query": self.query,
            "context_doc_id": self.context_doc_id,
            "gold_span": self.gold_span.to_json() if self.gold_span else None,
            "direction": self.direction,
            "meta": {
                "label": self.meta.label.to_json() if self.meta.label else None,
                "genre": self.meta.genre,
                "split": self.meta.split,
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpanExample":
        meta = obj.get("meta", {})
        label = meta.get("label")
        gold = obj.get("gold_span")
        return cls(
            example_id=obj["example_id"],
            query=obj["query"],
            context_doc_id=obj["context_doc_id"],
            gold_span=CharSpan(*gold) if gold is not None else None,
            direction=obj.get("direction", "1to2"),
            meta=ExampleMeta(
                label=ParaphraseLabel.from_json(label) if label else None,
                genre=meta.get("genre", ""),
                split=meta.get("split", "train"),
            ),
        )
