"""Slice scoring: slice-export JSONL in, LogitSheet JSONL out.

The sheet layout matches the span decoder's expectations: per slice,
start/end logits over [null] + context units, null_index pointing at
the [CLS] position (kept at index 0 here), and unit_char_spans holding
document-absolute character offsets so spans decode against the
original text. No span decoding happens on this side.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import torch

from .config import ScorerConfig, ScorerError


@dataclass(frozen=True)
class SliceRow:
    example_id: str
    slice_index: int
    query: str
    context_text: str
    context_start: int  # absolute char offset of the slice in the document


def read_slice_rows(path) -> list[SliceRow]:
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                span = obj["context_char_span"]  # [start, end] or {start, end}
                start = span[0] if isinstance(span, list) else span["start"]
                rows.append(
                    SliceRow(
                        example_id=obj["example_id"],
                        slice_index=obj["slice_index"],
                        query=obj["query"],
                        context_text=obj["context_text"],
                        context_start=start,
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ScorerError(f"{path}:{lineno}: bad slice row: {e}") from e
    return rows


def write_jsonl(path, rows: Iterable[dict]) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
    os.replace(tmp, path)


def _encode(tokenizer, row: SliceRow, max_units: int):
    enc = tokenizer(
        row.query,
        row.context_text,
        return_offsets_mapping=True,
        return_tensors=None,
    )
    n = len(enc["input_ids"])
    if n > max_units:
        raise ScorerError(
            f"{row.example_id}[{row.slice_index}]: {n} units exceed the "
            f"sequence budget {max_units}; slice export and scorer disagree"
        )
    return enc


def score_slices(
    model,
    tokenizer,
    rows: list[SliceRow],
    config: ScorerConfig,
) -> list[dict]:
    """One LogitSheet JSONL row per slice, ordered by (example_id, slice_index)."""
    model.eval()
    out = []
    rows = sorted(rows, key=lambda r: (r.example_id, r.slice_index))
    for i in range(0, len(rows), config.batch_size):
        batch = rows[i:i + config.batch_size]
        encs = [_encode(tokenizer, r, config.max_sequence_units) for r in batch]
        maxlen = max(len(e["input_ids"]) for e in encs)
        pad = tokenizer.pad_token_id
        input_ids = torch.tensor(
            [e["input_ids"] + [pad] * (maxlen - len(e["input_ids"])) for e in encs]
        )
        attention = torch.tensor(
            [[1] * len(e["input_ids"]) + [0] * (maxlen - len(e["input_ids"]))
             for e in encs]
        )
        token_type = torch.tensor(
            [e["token_type_ids"] + [0] * (maxlen - len(e["input_ids"]))
             for e in encs]
        )
        with torch.no_grad():
            res = model(
                input_ids=input_ids.to(config.device),
                attention_mask=attention.to(config.device),
                token_type_ids=token_type.to(config.device),
            )
        for row, enc, start_l, end_l in zip(
            batch, encs, res.start_logits.cpu(), res.end_logits.cpu()
        ):
            out.append(_sheet_row(row, enc, start_l.tolist(), end_l.tolist()))
    return out


def _sheet_row(row: SliceRow, enc, start_logits, end_logits) -> dict:
    # context tokens are the second segment, excluding both [SEP]s
    ctx = [
        i
        for i, (t, off) in enumerate(zip(enc["token_type_ids"], enc["offset_mapping"]))
        if t == 1 and off != (0, 0)
    ]
    if not ctx:
        raise ScorerError(f"{row.example_id}[{row.slice_index}]: empty context")
    spans = []
    for i in ctx:
        a, b = enc["offset_mapping"][i]
        spans.append([row.context_start + a, row.context_start + b])
        surface = row.context_text[a:b]
        if not surface.strip():
            raise ScorerError(
                f"{row.example_id}[{row.slice_index}]: offset misalignment at unit {i}"
            )
    # null ([CLS]) first, then the context units
    positions = [0] + ctx
    return {
        "example_id": row.example_id,
        "slice_index": row.slice_index,
        "null_index": 0,
        "start_logits": [start_logits[p] for p in positions],
        "end_logits": [end_logits[p] for p in positions],
        "unit_char_spans": spans,
    }


def score_file(model, tokenizer, slices_path, out_path, config: ScorerConfig) -> int:
    rows = read_slice_rows(slices_path)
    sheet_rows = score_slices(model, tokenizer, rows, config)
    write_jsonl(out_path, sheet_rows)
    return len(sheet_rows)
