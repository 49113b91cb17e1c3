"""Sentence embeddings for the embedding retrieval baseline.

One mean-pooled vector over the last hidden layer per input key, no
fine-tuning. Sentences are embedded in isolation by default (the
context-window variant is out of scope here). Empty sentences yield a
zero vector and are flagged rather than dropped, so downstream joins
stay total.
"""
from __future__ import annotations

import json

import torch

from .config import ScorerConfig, ScorerError
from .scoring import write_jsonl


def read_keys(path) -> list[str]:
    """Input is JSONL rows {"key": sentence} or plain text lines."""
    keys = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("{"):
                obj = json.loads(line)
                if "key" not in obj:
                    raise ScorerError(f"embedding input row without 'key': {line!r}")
                keys.append(obj["key"])
            else:
                keys.append(line)
    return keys


def embed_sentences(model, tokenizer, keys: list[str],
                    config: ScorerConfig) -> list[dict]:
    encoder = getattr(model, "bert", model)
    encoder.eval()
    out = []
    for i in range(0, len(keys), config.batch_size):
        batch = keys[i:i + config.batch_size]
        rows = []
        nonempty = []
        for key in batch:
            enc = tokenizer(key)
            # count real word tokens, not the [CLS]/[SEP] wrapping
            n_words = len(enc["input_ids"]) - 2
            rows.append({"key": key, "empty": n_words <= 0})
            if n_words > 0:
                nonempty.append((len(rows) - 1, enc))
        dim = encoder.config.hidden_size
        vectors = [[0.0] * dim] * len(rows)
        if nonempty:
            maxlen = max(len(e["input_ids"]) for _, e in nonempty)
            pad = tokenizer.pad_token_id
            ids = torch.tensor(
                [e["input_ids"] + [pad] * (maxlen - len(e["input_ids"]))
                 for _, e in nonempty]
            )
            mask = torch.tensor(
                [[1] * len(e["input_ids"]) + [0] * (maxlen - len(e["input_ids"]))
                 for _, e in nonempty]
            )
            with torch.no_grad():
                hidden = encoder(
                    input_ids=ids.to(config.device),
                    attention_mask=mask.to(config.device),
                ).last_hidden_state.cpu()
            for (row_i, enc), states in zip(nonempty, hidden):
                n = len(enc["input_ids"])
                vectors[row_i] = states[1:n - 1].mean(dim=0).tolist()
        for row, vec in zip(rows, vectors):
            row["vector"] = vec
            if not row["empty"]:
                del row["empty"]
            out.append(row)
    return out


def embed_file(model, tokenizer, in_path, out_path, config: ScorerConfig) -> int:
    rows = embed_sentences(model, tokenizer, read_keys(in_path), config)
    write_jsonl(out_path, rows)
    return len(rows)
