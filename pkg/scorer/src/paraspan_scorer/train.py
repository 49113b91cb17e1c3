"""Toy extractive-QA fine-tuning on synthetic data.

A from-scratch miniature encoder (2 layers, hidden 64) is enough for
the synthetic synonym language and keeps the end-to-end path runnable
on CPU in seconds. Full-corpus fine-tuning uses the same code with a
pretrained checkpoint and the recorded defaults (batch 32, lr 3e-5,
two epochs for the retrievable-only setup; batch 16, lr 2e-5 otherwise).
"""
from __future__ import annotations

import random

import numpy as np
import torch
from transformers import BertConfig, BertForQuestionAnswering

from .config import ScorerConfig, ScorerError
from .synth import SynthExample
from .wordpiece import build_word_tokenizer


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def tiny_model(vocab_size: int, max_positions: int = 128) -> BertForQuestionAnswering:
    config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=max_positions,
    )
    return BertForQuestionAnswering(config)


def _gold_token_positions(enc, example: SynthExample) -> tuple[int, int]:
    """Token positions of the gold span inside the encoded pair."""
    start = end = None
    for i, (t, off) in enumerate(zip(enc["token_type_ids"], enc["offset_mapping"])):
        if t != 1 or off == (0, 0):
            continue
        if off[0] >= example.gold_start and start is None:
            start = i
        if off[1] <= example.gold_end:
            end = i
    if start is None or end is None or end < start:
        raise ScorerError(f"{example.example_id}: gold span not token-aligned")
    return start, end


def train_toy_model(
    examples: list[SynthExample],
    config: ScorerConfig,
    epochs: int | None = None,
    learning_rate: float = 1e-3,
):
    """Returns (model, tokenizer) trained on the synthetic examples."""
    if not examples:
        raise ScorerError("no training examples")
    seed_everything(config.seed)
    texts = [ex.context_text for ex in examples] + [ex.query for ex in examples]
    tokenizer = build_word_tokenizer(texts)
    model = tiny_model(tokenizer.vocab_size)
    model.train()
    optim = torch.optim.AdamW(model.parameters(), lr=learning_rate)
    n_epochs = epochs if epochs is not None else config.epochs

    encoded = []
    for ex in examples:
        enc = tokenizer(ex.query, ex.context_text, return_offsets_mapping=True)
        s, e = _gold_token_positions(enc, ex)
        encoded.append((enc, s, e))

    order = list(range(len(encoded)))
    rng = random.Random(config.seed)
    for _ in range(n_epochs):
        rng.shuffle(order)
        for i in range(0, len(order), config.batch_size):
            batch = [encoded[j] for j in order[i:i + config.batch_size]]
            maxlen = max(len(enc["input_ids"]) for enc, _, _ in batch)
            pad = tokenizer.pad_token_id
            ids = torch.tensor(
                [enc["input_ids"] + [pad] * (maxlen - len(enc["input_ids"]))
                 for enc, _, _ in batch]
            )
            mask = torch.tensor(
                [[1] * len(enc["input_ids"]) + [0] * (maxlen - len(enc["input_ids"]))
                 for enc, _, _ in batch]
            )
            types = torch.tensor(
                [enc["token_type_ids"] + [0] * (maxlen - len(enc["input_ids"]))
                 for enc, _, _ in batch]
            )
            starts = torch.tensor([s for _, s, _ in batch])
            ends = torch.tensor([e for _, _, e in batch])
            optim.zero_grad()
            out = model(
                input_ids=ids,
                attention_mask=mask,
                token_type_ids=types,
                start_positions=starts,
                end_positions=ends,
            )
            out.loss.backward()
            optim.step()
    model.eval()
    return model, tokenizer
