"""Command-line entry point.

Pipelines communicate through JSONL/JSON files; all outputs are written
atomically and every report embeds the hash of the settings that
produced it. Timestamps live in a sibling ``.meta.json`` so report files
are byte-identical across reruns.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .jsonl import write_json, write_jsonl
from .types import Document


def config_hash(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _write_meta(out_path: Path, args: argparse.Namespace) -> None:
    write_json(
        out_path.with_suffix(out_path.suffix + ".meta.json"),
        {
            "command": args.command,
            "config_hash": config_hash(args),
            "version": __version__,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        },
    )


def _load_examples(path) -> list:
    from .corpus import read_examples

    return read_examples(path)


def _load_docs(path) -> dict[str, Document]:
    from .corpus import load_documents

    return load_documents(path)


# -- commands ---------------------------------------------------------------


def cmd_convert(args) -> int:
    from .corpus import convert_to_examples, load_corpus, split_counts

    corpus = load_corpus(args.pairs, args.docs, format=args.format)
    for err in corpus.errors:
        print(f"error: {err.path}:{err.lineno}: {err.message}", file=sys.stderr)
    examples = convert_to_examples(corpus.pairs, corpus.documents, args.setup)
    write_jsonl(args.out, (ex.to_json() for ex in examples))
    _write_meta(Path(args.out), args)
    counts = split_counts(examples)
    print(
        f"wrote {len(examples)} examples "
        f"(train {counts['train']} / devel {counts['devel']} / test {counts['test']})"
        + (f", {len(corpus.errors)} records rejected" if corpus.errors else "")
        + (f", skipped {dict(corpus.skip_reasons)}" if corpus.skip_reasons else "")
    )
    return 1 if corpus.errors else 0


def cmd_slice(args) -> int:
    from .windowing import budget_for, slice_document, slice_export_records, word_unit_map

    examples = _load_examples(args.examples)
    docs = _load_docs(args.docs)
    records = []
    failures = []
    for ex in examples:
        doc = docs[ex.context_doc_id]
        try:
            units = word_unit_map(doc.text)
            query_units = len(word_unit_map(ex.query))
            budget = budget_for(ex, query_units, max_sequence_units=args.max_seq)
            slice_set = slice_document(ex, units, budget, overlap=args.overlap)
        except Exception as e:
            failures.append((ex.example_id, str(e)))
            continue
        records.extend(slice_export_records(slice_set, ex, doc.text))
    write_jsonl(args.out, records)
    _write_meta(Path(args.out), args)
    for ex_id, msg in failures:
        print(f"error: {ex_id}: {msg}", file=sys.stderr)
    print(f"wrote {len(records)} slices for {len(examples) - len(failures)} examples")
    return 1 if failures else 0


def cmd_decode(args) -> int:
    from .decoder import decode_all, read_logit_sheets
    from .pipeline import decode_with_mock

    examples = _load_examples(args.examples)
    docs = _load_docs(args.docs)
    if args.mock:
        run = decode_with_mock(
            examples,
            docs,
            args.setup,
            max_sequence_units=args.max_seq,
            overlap=args.overlap,
            max_span_units=args.max_span_units,
        )
    else:
        if not args.logits:
            print("error: need --logits FILE or --mock", file=sys.stderr)
            return 2
        sheets = read_logit_sheets(args.logits)
        texts = {d.doc_id: d.text for d in docs.values()}
        run = decode_all(
            examples, sheets, texts, args.setup, max_span_units=args.max_span_units
        )
    write_jsonl(args.out, (p.to_json() for p in run.predictions))
    _write_meta(Path(args.out), args)
    for ex_id in run.skipped:
        print(f"error: no logit sheet for {ex_id}, skipped", file=sys.stderr)
    print(f"wrote {len(run.predictions)} predictions, skipped {len(run.skipped)}")
    return 1 if run.skipped else 0


def cmd_retrieve(args) -> int:
    from .baselines import EmbeddingSource, TfIdfModel, fit_tfidf
    from .pipeline import retrieval_predictions, training_sentences

    examples = _load_examples(args.examples)
    docs = _load_docs(args.docs)
    model = None
    embeddings = None
    if args.method == "tfidf":
        if args.model and Path(args.model).exists():
            model = TfIdfModel.load(args.model)
        elif args.train_examples:
            train = _load_examples(args.train_examples)
            model = fit_tfidf(training_sentences(train, docs))
            if args.model:
                model.save(args.model)
        else:
            print(
                "error: tfidf needs --model (existing) or --train-examples",
                file=sys.stderr,
            )
            return 2
    elif args.method == "embedding":
        if not args.embeddings:
            print("error: embedding retrieval needs --embeddings", file=sys.stderr)
            return 2
        embeddings = EmbeddingSource.from_jsonl(args.embeddings)
    preds = retrieval_predictions(
        args.method, examples, docs, tfidf_model=model, embeddings=embeddings
    )
    write_jsonl(args.out, (p.to_json() for p in preds))
    _write_meta(Path(args.out), args)
    print(f"wrote {len(preds)} {args.method} predictions")
    return 0


def cmd_eval(args) -> int:
    from .decoder import SpanPrediction
    from .jsonl import read_jsonl
    from .metrics import render_report
    from .pipeline import build_report, score_predictions

    examples = {ex.example_id: ex for ex in _load_examples(args.examples)}
    docs = _load_docs(args.docs)
    preds = [SpanPrediction.from_json(o) for _, o in read_jsonl(args.predictions)]
    scored = score_predictions(
        preds, examples, docs, normalized=args.metric_normalization == "normalized"
    )
    report = build_report(scored, examples, config_hash=config_hash(args))
    write_json(args.out, report)
    _write_meta(Path(args.out), args)
    print(render_report(report))
    return 0


def cmd_analyze(args) -> int:
    from .analysis import (
        build_negative_registry,
        categorize_error,
        classify_trivial,
        error_distribution,
        load_resources,
        review_row,
        sample_for_review,
    )
    from .corpus import load_corpus
    from .decoder import SpanPrediction
    from .jsonl import read_jsonl
    from .pipeline import build_report, score_predictions

    examples = {ex.example_id: ex for ex in _load_examples(args.examples)}
    docs = _load_docs(args.docs)
    preds = {
        o["example_id"]: SpanPrediction.from_json(o)
        for _, o in read_jsonl(args.predictions)
    }
    scored = score_predictions(preds.values(), examples, docs)

    registry = {}
    if args.pairs:
        corpus = load_corpus(args.pairs, args.docs, format=args.format)
        registry = build_negative_registry(corpus.pairs)

    categories = {}
    for s in scored:
        if s.em:
            continue
        ex = examples[s.example_id]
        doc = docs[ex.context_doc_id]
        categories[s.example_id] = categorize_error(
            preds[s.example_id], ex, doc, registry.get(doc.doc_id)
        )
    report = build_report(scored, examples, config_hash=config_hash(args))
    report["error_categories"] = {
        k: round(v, 2) for k, v in error_distribution(categories.values()).items()
    }

    resource_dir = args.resources or os.environ.get("PARASPAN_RESOURCES")
    if resource_dir:
        res = load_resources(
            Path(resource_dir) / "lemmas.tsv",
            Path(resource_dir) / "synonyms.tsv",
            Path(resource_dir) / "stop_lemmas.txt",
        )
        trivial: dict[str, list] = {}
        for s in scored:
            ex = examples[s.example_id]
            if ex.gold_span is None:
                continue
            gold = docs[ex.context_doc_id].slice(ex.gold_span)
            cat = classify_trivial(ex.query, gold, res)
            trivial.setdefault(cat, []).append(s)
        report["by_trivial_category"] = {
            cat: {
                "acc": round(100.0 * sum(x.em for x in group) / len(group), 2),
                "n": len(group),
            }
            for cat, group in trivial.items()
        }

    write_json(args.out, report)
    _write_meta(Path(args.out), args)

    if args.review_out:
        rows = [
            review_row(preds[ex_id], examples[ex_id], docs[examples[ex_id].context_doc_id])
            for ex_id, cat in categories.items()
            if cat == "other"
        ]
        sample = sample_for_review(rows, args.sample_k, args.seed)
        write_jsonl(args.review_out, sample.rows)
        note = " (population smaller than k)" if sample.truncated else ""
        print(f"wrote {len(sample.rows)} review rows{note}")
    print(f"analyzed {len(scored)} examples, {len(categories)} errors")
    return 0


def cmd_augment(args) -> int:
    from .augment import (
        BackTranslationRecord,
        double_with_irretrievables,
        filter_bt,
        sample_strategy,
    )
    from .baselines import TfIdfModel
    from .jsonl import read_jsonl

    if args.mode == "irretrievable":
        examples = _load_examples(args.examples)
        docs = _load_docs(args.docs)
        retrievable = [ex for ex in examples if ex.gold_span is not None]
        doubled, new_docs = double_with_irretrievables(retrievable, docs)
        write_jsonl(args.out, (ex.to_json() for ex in doubled))
        if args.docs_out:
            write_jsonl(
                args.docs_out,
                (
                    {"doc_id": d.doc_id, "genre": d.genre, "text": d.text}
                    for d in new_docs.values()
                ),
            )
        print(f"wrote {len(doubled)} training instances")
    else:  # backtranslation
        records = [
            BackTranslationRecord.from_json(o) for _, o in read_jsonl(args.records)
        ]
        result = filter_bt(records, normalized=not args.raw_identity)
        model = TfIdfModel.load(args.model) if args.model else None
        sampled = sample_strategy(
            result.retained, args.strategy, args.n, tfidf_model=model, seed=args.seed
        )
        write_jsonl(args.out, (ex.to_json() for ex in sampled.examples))
        note = " (fewer qualifying records than requested)" if sampled.short_of_target else ""
        print(
            f"wrote {len(sampled.examples)} examples{note}; "
            f"dropped {dict(result.dropped)}"
        )
    _write_meta(Path(args.out), args)
    return 0


def cmd_report(args) -> int:
    from .metrics import render_report

    reports = {}
    for path in args.reports:
        with open(path, encoding="utf-8") as f:
            reports[path] = json.load(f)
        print(f"== {path}")
        print(render_report(reports[path]))
    if args.assert_oracle_dominance:
        oracle = [r for p, r in reports.items() if "oracle" in Path(p).stem]
        others = [r for p, r in reports.items() if "oracle" not in Path(p).stem]
        if not oracle:
            print("error: no oracle report among inputs", file=sys.stderr)
            return 2
        oracle_f1 = oracle[0]["overall"]["f1"]
        for rep in others:
            if rep["overall"]["f1"] > oracle_f1:
                print(
                    f"error: oracle dominance violated: {rep['overall']['f1']} "
                    f"> {oracle_f1}",
                    file=sys.stderr,
                )
                return 1
        print(f"oracle dominance holds (oracle F {oracle_f1})")
    return 0


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraspan",
        description="paraphrase span detection pipelines",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, setup=False, windowing=False):
        p.add_argument("--seed", type=int, default=0)
        if setup:
            p.add_argument("--setup", type=int, choices=(1, 2), default=1)
        if windowing:
            p.add_argument("--overlap", type=int, default=128)
            p.add_argument("--max-seq", type=int, default=512)

    p = sub.add_parser("convert", help="corpus pairs -> span examples")
    p.add_argument("--pairs", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--format", choices=("native", "turku"), default="native")
    p.add_argument("--out", required=True)
    common(p, setup=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("slice", help="export overlapping document slices")
    p.add_argument("--examples", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--out", required=True)
    common(p, windowing=True)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("decode", help="logits -> span predictions")
    p.add_argument("--examples", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--logits", help="LogitSheet JSONL from the scorer")
    p.add_argument("--mock", action="store_true", help="use the lexical mock scorer")
    p.add_argument("--max-span-units", type=int, default=None)
    p.add_argument("--out", required=True)
    common(p, setup=True, windowing=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("retrieve", help="sentence-level baselines")
    p.add_argument("--method", choices=("tfidf", "embedding", "oracle"), required=True)
    p.add_argument("--examples", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--train-examples", help="training split for tf-idf fitting")
    p.add_argument("--model", help="tf-idf model artifact to load or save")
    p.add_argument("--embeddings", help="embedding JSONL for the embedding method")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("eval", help="score predictions against gold spans")
    p.add_argument("--predictions", required=True)
    p.add_argument("--examples", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument(
        "--metric-normalization",
        choices=("normalized", "strict"),
        default="normalized",
    )
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="error categories and breakdowns")
    p.add_argument("--predictions", required=True)
    p.add_argument("--examples", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--pairs", help="corpus pairs for the negative-span registry")
    p.add_argument("--format", choices=("native", "turku"), default="native")
    p.add_argument("--resources", help="dir with lemmas.tsv, synonyms.tsv, stop_lemmas.txt")
    p.add_argument("--sample-k", type=int, default=200)
    p.add_argument("--review-out")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("augment", help="build augmentation training sets")
    p.add_argument("--mode", choices=("irretrievable", "backtranslation"), required=True)
    p.add_argument("--examples")
    p.add_argument("--docs")
    p.add_argument("--docs-out")
    p.add_argument("--records", help="back-translation records JSONL")
    p.add_argument(
        "--strategy",
        choices=("random", "tfidf_band", "tfidf_most_dissimilar"),
        default="random",
    )
    p.add_argument("--n", type=int, default=138_706)
    p.add_argument("--model", help="tf-idf model artifact for tf-idf strategies")
    p.add_argument("--raw-identity", action="store_true",
                   help="compare identical back-translations on raw strings")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("report", help="render report JSON files")
    p.add_argument("reports", nargs="+")
    p.add_argument("--assert-oracle-dominance", action="store_true")
    p.set_defaults(func=cmd_report)

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
