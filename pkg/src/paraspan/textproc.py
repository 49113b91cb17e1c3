"""Tokenization, normalization and sentence segmentation with exact offsets.

All offsets are Unicode scalar value positions into the original text, so
every token and sentence surface can be recovered by slicing.
"""
from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

from .types import CharSpan

SENTENCE_FINAL = {".", "!", "?", "…"}  # . ! ? …


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class Token:
    surface: str
    char_span: CharSpan
    is_punct: bool


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]
    source_doc_id: str = ""

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass(frozen=True)
class SentenceIndex:
    sentences: tuple[CharSpan, ...]


def tokenize(text: str, source_doc_id: str = "") -> TokenStream:
    """Split on whitespace, then peel leading/trailing punctuation.

    Each peeled punctuation character becomes its own token flagged
    is_punct. Internal punctuation (hyphens, apostrophes) stays inside
    the word token.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        tokens.extend(_split_chunk(text, i, j))
        i = j
    return TokenStream(tuple(tokens), source_doc_id)


def _split_chunk(text: str, start: int, end: int) -> list[Token]:
    lo, hi = start, end
    leading: list[Token] = []
    trailing: list[Token] = []
    while lo < hi and _is_punct(text[lo]):
        leading.append(Token(text[lo], CharSpan(lo, lo + 1), True))
        lo += 1
    while hi > lo and _is_punct(text[hi - 1]):
        trailing.append(Token(text[hi - 1], CharSpan(hi - 1, hi), True))
        hi -= 1
    out = leading
    if lo < hi:
        out.append(Token(text[lo:hi], CharSpan(lo, hi), False))
    out.extend(reversed(trailing))
    return out


def normalize_tokens(stream: TokenStream, casefold: bool = True) -> Counter:
    """Bag of normalized token strings: punctuation dropped, lower-cased."""
    bag: Counter = Counter()
    for tok in stream.tokens:
        if tok.is_punct:
            continue
        bag[tok.surface.casefold() if casefold else tok.surface] += 1
    return bag


def normalized_sequence(text: str, casefold: bool = True) -> list[str]:
    """Normalized token strings in document order (punctuation removed)."""
    out = []
    for tok in tokenize(text).tokens:
        if tok.is_punct:
            continue
        out.append(tok.surface.casefold() if casefold else tok.surface)
    return out


def normalized_bag(text: str, casefold: bool = True) -> Counter:
    return Counter(normalized_sequence(text, casefold=casefold))


def split_sentences(text: str) -> SentenceIndex:
    """Rule-based segmentation.

    Boundaries: sentence-final punctuation followed by whitespace and an
    uppercase letter (or end of line), and hard newlines. Sentence spans
    are trimmed of surrounding whitespace, so every character is either
    inside exactly one sentence or in a pure-whitespace gap.
    """
    sentences: list[CharSpan] = []
    pos = 0
    n = len(text)
    for line in text.split("\n"):
        line_start = pos
        line_end = pos + len(line)
        sentences.extend(_split_line(text, line_start, line_end))
        pos = line_end + 1
    return SentenceIndex(tuple(sentences))


def _split_line(text: str, start: int, end: int) -> list[CharSpan]:
    spans: list[CharSpan] = []
    seg_start = start
    i = start
    while i < end:
        ch = text[i]
        if ch in SENTENCE_FINAL:
            # swallow a run of terminal punctuation ("..", "?!")
            j = i + 1
            while j < end and text[j] in SENTENCE_FINAL:
                j = j + 1
            # boundary only when followed by whitespace + uppercase
            k = j
            while k < end and text[k].isspace():
                k += 1
            if k > j and k < end and text[k].isupper():
                spans.append(_trimmed(text, seg_start, j))
                seg_start = k
                i = k
                continue
            i = j
        else:
            i += 1
    spans.append(_trimmed(text, seg_start, end))
    return [s for s in spans if s is not None]


def _trimmed(text: str, start: int, end: int) -> CharSpan | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return CharSpan(start, end)
