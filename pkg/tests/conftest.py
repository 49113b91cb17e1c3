import json
import random

import pytest

from paraspan.types import (
    CharSpan,
    Document,
    ExampleMeta,
    ParaphraseLabel,
    PairSide,
    ParaphrasePair,
    SpanExample,
)


def make_documents(texts, genre="subtitle"):
    return {
        f"d{i}": Document(doc_id=f"d{i}", text=t, genre=genre)
        for i, t in enumerate(texts)
    }


def pair_from_docs(pair_id, doc1, span1, doc2, span2, split="train",
                   label=None, negative=False):
    if label is None and not negative:
        label = ParaphraseLabel(base="context_independent")
    return ParaphrasePair(
        pair_id=pair_id,
        side1=PairSide(doc1.doc_id, span1, doc1.slice(span1)),
        side2=PairSide(doc2.doc_id, span2, doc2.slice(span2)),
        split=split,
        is_negative=negative,
        label=None if negative else label,
    )


def simple_example(query, doc_text, gold=None, example_id="ex1", genre="subtitle",
                   split="test", label=None):
    return SpanExample(
        example_id=example_id,
        query=query,
        context_doc_id="doc",
        gold_span=gold,
        direction="1to2",
        meta=ExampleMeta(label=label, genre=genre, split=split),
    )


WORDS = [
    "kissa", "koira", "istui", "juoksi", "talo", "auto", "nopea", "hidas",
    "punainen", "sininen", "iso", "pieni", "katsoi", "sanoi", "meni", "tuli",
]


def random_document_text(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_words))


@pytest.fixture
def tiny_corpus_files(tmp_path):
    """Three positive pairs + one negative pair as native JSONL files."""
    docs = [
        ("a1", "Kissa istui matolla koko päivän.", "subtitle"),
        ("a2", "Katti lojui matolla päiväkaudet.", "subtitle"),
        ("b1", "Auto oli todella nopea. Se voitti kisan.", "news"),
        ("b2", "Ajoneuvo liikkui vauhdilla. Kisa päättyi sen voittoon.", "news"),
        ("c1", "Hän meni kauppaan ostamaan leipää.", "subtitle"),
        ("c2", "Hän kävi ostoksilla leipäosastolla.", "subtitle"),
        ("n1", "Talo oli punainen ja vanha.", "forum"),
        ("n2", "Rakennus oli sininen ja uusi.", "forum"),
    ]
    docs_path = tmp_path / "docs.jsonl"
    with open(docs_path, "w", encoding="utf-8") as f:
        for doc_id, text, genre in docs:
            f.write(json.dumps({"doc_id": doc_id, "text": text, "genre": genre}) + "\n")

    text = {d[0]: d[1] for d in docs}

    def side(doc_id, needle):
        start = text[doc_id].index(needle)
        return {"doc_id": doc_id, "start": start, "end": start + len(needle),
                "text": needle}

    pairs = [
        {
            "pair_id": "p1",
            "label": {"base": "context_independent", "flags": []},
            "is_negative": False,
            "split": "train",
            "side1": side("a1", "Kissa istui matolla"),
            "side2": side("a2", "Katti lojui matolla"),
        },
        {
            "pair_id": "p2",
            "label": {"base": "context_dependent", "flags": []},
            "is_negative": False,
            "split": "test",
            "side1": side("b1", "Auto oli todella nopea."),
            "side2": side("b2", "Ajoneuvo liikkui vauhdilla."),
        },
        {
            "pair_id": "p3",
            "label": {
                "base": "context_independent",
                "flags": ["subsumption"],
                "subsumption_direction": "left_subsumes_right",
            },
            "is_negative": False,
            "split": "devel",
            "side1": side("c1", "meni kauppaan ostamaan leipää"),
            "side2": side("c2", "kävi ostoksilla leipäosastolla"),
        },
        {
            "pair_id": "n1",
            "label": None,
            "is_negative": True,
            "split": "test",
            "side1": side("n1", "Talo oli punainen"),
            "side2": side("n2", "Rakennus oli sininen"),
        },
    ]
    pairs_path = tmp_path / "pairs.jsonl"
    with open(pairs_path, "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")
    return pairs_path, docs_path
