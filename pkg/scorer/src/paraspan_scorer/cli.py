"""Command-line adapter: score / embed / backtranslate.

``--checkpoint`` loads any question-answering (or encoder) checkpoint
via transformers; ``--toy SEED`` trains the miniature model on the
synthetic synonym language first, which keeps the full pipeline
runnable offline.
"""
from __future__ import annotations

import argparse
import sys

from .config import ScorerConfig
from .scoring import score_file
from .embedding import embed_file


def _load(args, for_embedding=False):
    config = ScorerConfig(
        max_sequence_units=args.max_seq,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    if args.checkpoint:
        from transformers import AutoModel, AutoModelForQuestionAnswering, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(args.checkpoint)
        cls = AutoModel if for_embedding else AutoModelForQuestionAnswering
        model = cls.from_pretrained(args.checkpoint)
    else:
        from .synth import generate
        from .train import train_toy_model

        examples = generate(args.toy_examples, seed=args.seed)
        model, tokenizer = train_toy_model(examples, config, epochs=args.toy_epochs)
    return model, tokenizer, config


def cmd_score(args) -> int:
    model, tokenizer, config = _load(args)
    n = score_file(model, tokenizer, args.slices, args.out, config)
    print(f"wrote {n} logit sheets")
    return 0


def cmd_embed(args) -> int:
    model, tokenizer, config = _load(args, for_embedding=True)
    n = embed_file(model, tokenizer, args.sentences, args.out, config)
    print(f"wrote {n} embeddings")
    return 0


def cmd_backtranslate(args) -> int:
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    from .backtranslate import HuggingFaceTranslator, backtranslate_file

    legs = []
    for name in (args.forward_model, args.backward_model):
        tok = AutoTokenizer.from_pretrained(name)
        model = AutoModelForSeq2SeqLM.from_pretrained(name)
        legs.append(HuggingFaceTranslator(model, tok))
    counter = legs[1].tokenizer
    n = backtranslate_file(
        args.targets, args.out, legs[0], legs[1],
        subword_counter=lambda s: len(counter(s)["input_ids"]),
    )
    print(f"wrote {n} back-translation records")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paraspan-scorer")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--checkpoint", help="transformers checkpoint to load")
        p.add_argument("--toy-examples", type=int, default=800,
                       help="synthetic training size when no checkpoint is given")
        p.add_argument("--toy-epochs", type=int, default=30)
        p.add_argument("--max-seq", type=int, default=512)
        p.add_argument("--batch-size", type=int, default=32)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("score", help="slice-export JSONL -> LogitSheet JSONL")
    p.add_argument("--slices", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("embed", help="sentences -> embedding JSONL")
    p.add_argument("--sentences", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("backtranslate", help="targets -> BT records JSONL")
    p.add_argument("--targets", required=True)
    p.add_argument("--forward-model", required=True)
    p.add_argument("--backward-model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_backtranslate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
