import json

from paraspan_scorer.backtranslate import backtranslate, backtranslate_file


class ToyTranslator:
    """Deterministic stand-in: maps words through a fixed table."""

    def __init__(self, table):
        self.table = table

    def translate(self, texts):
        return [
            " ".join(self.table.get(w, w) for w in t.split()) for t in texts
        ]


class FailingTranslator:
    def translate(self, texts):
        raise RuntimeError("model unavailable")


FWD = ToyTranslator({"kissa": "cat", "istui": "sat", "koira": "dog"})
BACK = ToyTranslator({"cat": "katti", "sat": "istui", "dog": "koira"})


def target(doc_id, text, start=0):
    return {"doc_id": doc_id, "start": start, "end": start + len(text),
            "text": text}


class TestBacktranslate:
    def test_cardinality_and_schema(self):
        targets = [target(f"d{i}", "kissa istui") for i in range(5)]
        records = backtranslate(targets, FWD, BACK,
                                subword_counter=lambda s: len(s.split()))
        assert len(records) == 5
        rec = records[0]
        assert rec["source_doc_id"] == "d0"
        assert rec["original"] == {"start": 0, "end": 11, "text": "kissa istui"}
        assert rec["back_translation"] == "katti istui"
        assert rec["word_count"] == 2
        assert rec["subword_count"] == 2

    def test_identical_round_trip_still_emitted(self):
        # "koira" -> "dog" -> "koira": filtering is the consumer's job
        records = backtranslate([target("d", "koira")], FWD, BACK)
        assert len(records) == 1
        assert records[0]["back_translation"] == "koira"

    def test_failures_skipped_not_fatal(self, capsys):
        records = backtranslate([target("d", "kissa")], FailingTranslator(), BACK)
        assert records == []
        assert "translation failed" in capsys.readouterr().err

    def test_records_parse_downstream(self):
        from paraspan.augment import BackTranslationRecord

        records = backtranslate([target("d", "kissa istui")], FWD, BACK,
                                subword_counter=lambda s: len(s.split()))
        rec = BackTranslationRecord.from_json(records[0])
        assert rec.back_translation == "katti istui"
        assert rec.effective_subwords() == 2

    def test_file_round_trip(self, tmp_path):
        src = tmp_path / "targets.jsonl"
        src.write_text(json.dumps(target("d9", "kissa istui", start=4)) + "\n")
        out = tmp_path / "records.jsonl"
        assert backtranslate_file(src, out, FWD, BACK) == 1
        rec = json.loads(out.read_text())
        assert rec["original"]["start"] == 4
