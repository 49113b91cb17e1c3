"""Synthetic paraphrase-in-context data for the toy training path.

The vocabulary is built from paired word types: every surface word
``wNNa`` has a synonym ``wNNb``. Documents use only the ``a`` variants
and queries only the ``b`` variants, so a query never shares a word
with its gold span — a purely lexical scorer is blind here and any
signal must come from learned synonym embeddings.
"""
from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class SynthExample:
    example_id: str
    query: str
    context_text: str
    gold_start: int  # char offsets into context_text
    gold_end: int


def vocabulary(n_pairs: int = 30) -> list[tuple[str, str]]:
    return [(f"w{i:02d}a", f"w{i:02d}b") for i in range(n_pairs)]


def _synonymize(sentence: str, table: dict[str, str]) -> str:
    return " ".join(table[w] for w in sentence.split())


def generate(
    n: int,
    seed: int,
    n_pairs: int = 30,
    sentences_per_doc: int = 3,
    words_per_sentence: int = 4,
    prefix: str = "syn",
) -> list[SynthExample]:
    """n examples; the query is the synonymized copy of one sentence."""
    rng = random.Random(seed)
    vocab = vocabulary(n_pairs)
    a_words = [a for a, _ in vocab]
    table = {a: b for a, b in vocab}
    out = []
    for i in range(n):
        sents = [
            " ".join(rng.choice(a_words) for _ in range(words_per_sentence))
            for _ in range(sentences_per_doc)
        ]
        gold_idx = rng.randrange(sentences_per_doc)
        text = " ".join(sents)
        start = len(" ".join(sents[:gold_idx])) + (1 if gold_idx else 0)
        end = start + len(sents[gold_idx])
        out.append(
            SynthExample(
                example_id=f"{prefix}{i:04d}",
                query=_synonymize(sents[gold_idx], table),
                context_text=text,
                gold_start=start,
                gold_end=end,
            )
        )
    return out


def all_surfaces(n_pairs: int = 30) -> list[str]:
    """Every word type, for tokenizer vocabulary induction."""
    return [w for pair in vocabulary(n_pairs) for w in pair]


def lexical_overlap(example: SynthExample) -> float:
    """Fraction of query words present in the gold span (should be 0)."""
    gold = set(example.context_text[example.gold_start:example.gold_end].split())
    query = example.query.split()
    if not query:
        return 0.0
    return sum(1 for w in query if w in gold) / len(query)
