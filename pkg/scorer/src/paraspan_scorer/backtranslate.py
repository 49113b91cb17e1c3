"""Back-translation round trips emitting the augment pipeline's records.

Translation itself is behind a small protocol so the round trip can run
against real seq2seq checkpoints (beam 6, length normalization 0.6 in
both directions) or any stand-in. Identical round trips are still
emitted — filtering is the consumer's job, not ours.
"""
from __future__ import annotations

import json
import sys
from typing import Protocol

from .config import ScorerError
from .scoring import write_jsonl


class Translator(Protocol):
    def translate(self, texts: list[str]) -> list[str]: ...


class HuggingFaceTranslator:
    """Beam-search wrapper over a seq2seq checkpoint."""

    def __init__(self, model, tokenizer, num_beams: int = 6,
                 length_penalty: float = 0.6, device: str = "cpu"):
        self.model = model.to(device)
        self.tokenizer = tokenizer
        self.num_beams = num_beams
        self.length_penalty = length_penalty
        self.device = device

    def translate(self, texts: list[str]) -> list[str]:
        import torch

        enc = self.tokenizer(texts, return_tensors="pt", padding=True)
        with torch.no_grad():
            out = self.model.generate(
                **{k: v.to(self.device) for k, v in enc.items()},
                num_beams=self.num_beams,
                length_penalty=self.length_penalty,
                num_return_sequences=1,  # keep the most probable sequence
            )
        return self.tokenizer.batch_decode(out, skip_special_tokens=True)


def read_targets(path) -> list[dict]:
    """Target sentences: JSONL rows {doc_id, start, end, text}."""
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rows.append(
                    {
                        "doc_id": obj["doc_id"],
                        "start": obj["start"],
                        "end": obj["end"],
                        "text": obj["text"],
                    }
                )
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ScorerError(f"{path}:{lineno}: bad target row: {e}") from e
    return rows


def backtranslate(
    targets: list[dict],
    forward: Translator,
    backward: Translator,
    subword_counter=None,
) -> list[dict]:
    """One record per target that survives both translation legs."""
    records = []
    for row in targets:
        try:
            pivot = forward.translate([row["text"]])[0]
            back = backward.translate([pivot])[0]
        except Exception as e:
            print(f"warning: {row['doc_id']}: translation failed: {e}",
                  file=sys.stderr)
            continue
        record = {
            "source_doc_id": row["doc_id"],
            "original": {
                "start": row["start"],
                "end": row["end"],
                "text": row["text"],
            },
            "back_translation": back,
            "word_count": len(back.split()),
        }
        if subword_counter is not None:
            record["subword_count"] = subword_counter(back)
        records.append(record)
    return records


def backtranslate_file(in_path, out_path, forward: Translator,
                       backward: Translator, subword_counter=None) -> int:
    records = backtranslate(read_targets(in_path), forward, backward,
                            subword_counter)
    write_jsonl(out_path, records)
    return len(records)
