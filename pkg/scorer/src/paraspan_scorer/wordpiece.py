"""Word-level fast tokenizer with character offsets.

A WordLevel vocabulary is enough for the toy training path and keeps
one subword per word, so "subword" and "word token" coincide. Real
checkpoints bring their own tokenizer; everything downstream only
relies on the offset mapping.
"""
from __future__ import annotations

from tokenizers import Tokenizer
from tokenizers.models import WordLevel
from tokenizers.pre_tokenizers import Whitespace
from tokenizers.processors import TemplateProcessing
from transformers import PreTrainedTokenizerFast

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]


def build_word_tokenizer(texts: list[str]) -> PreTrainedTokenizerFast:
    """Vocabulary = every whitespace/punct word seen in texts."""
    vocab = {tok: i for i, tok in enumerate(SPECIALS)}
    pre = Whitespace()
    for text in texts:
        for word, _span in pre.pre_tokenize_str(text):
            if word not in vocab:
                vocab[word] = len(vocab)
    tok = Tokenizer(WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre
    tok.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        model_input_names=["input_ids", "token_type_ids", "attention_mask"],
    )
