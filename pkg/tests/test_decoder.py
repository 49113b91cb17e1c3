import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraspan.decoder import (
    DecodeError,
    LogitSheet,
    SheetSlice,
    decode_all,
    decode_sheet,
    decode_slice,
    merge_slices,
    mock_lexical_scorer,
    read_logit_sheets,
    sheet_records,
)
from paraspan.jsonl import write_jsonl
from paraspan.types import CharSpan
from paraspan.windowing import slice_document, word_unit_map

from conftest import simple_example
from test_windowing import make_budget


def make_slice(start, end, index=0, null_index=None, offset=0):
    """Sheet slice over len(start)-1 context units with synthetic offsets."""
    n = len(start) - 1
    if null_index is None:
        null_index = n
    return SheetSlice(
        slice_index=index,
        start_logits=tuple(start),
        end_logits=tuple(end),
        unit_char_spans=tuple(
            CharSpan(offset + 2 * i, offset + 2 * i + 1) for i in range(n)
        ),
        null_index=null_index,
    )


def brute_force(slices, max_span_units=None):
    """Independent oracle: enumerate every valid span in every slice."""
    best = None
    null = math.inf
    for sl in slices:
        positions = [p for p in range(len(sl.start_logits)) if p != sl.null_index]
        null = min(null, sl.start_logits[sl.null_index] + sl.end_logits[sl.null_index])
        n = len(positions)
        for s in range(n):
            for e in range(s, n):
                if max_span_units is not None and e - s + 1 > max_span_units:
                    continue
                score = sl.start_logits[positions[s]] + sl.end_logits[positions[e]]
                span = CharSpan(sl.unit_char_spans[s].start, sl.unit_char_spans[e].end)
                key = (-score, span.start, span.end, sl.slice_index)
                if best is None or key < best[0]:
                    best = (key, span, score)
    return best[1], best[2], null


class TestDecodeSlice:
    def test_three_unit_enumeration(self):
        # all six valid pairs: best is (0,2) with 2.0 + 2.5
        sl = make_slice([2.0, 0.5, 1.0, 0.0], [0.1, 0.3, 2.5, 0.0])
        cands, _ = decode_slice(sl, top_k=6)
        assert cands[0].unit_span == (0, 2)
        assert cands[0].score == pytest.approx(4.5)
        assert len(cands) == 6

    def test_single_unit(self):
        sl = make_slice([1.5, 0.0], [2.5, 0.0])
        cands, _ = decode_slice(sl)
        assert len(cands) == 1
        assert cands[0].unit_span == (0, 0)
        assert cands[0].score == pytest.approx(4.0)

    def test_length_cap(self):
        sl = make_slice([2.0, 0.5, 1.0, 0.0], [0.1, 0.3, 2.5, 0.0])
        cands, _ = decode_slice(sl, max_span_units=1)
        assert cands[0].unit_span == (2, 2)
        assert cands[0].score == pytest.approx(3.5)

    def test_null_score(self):
        sl = make_slice([1.0, 7.0], [1.0, 3.0], null_index=1)
        _, null_score = decode_slice(sl)
        assert null_score == pytest.approx(10.0)

    def test_null_at_front(self):
        sl = make_slice([9.0, 1.0, 2.0], [9.0, 3.0, 4.0], null_index=0)
        cands, null_score = decode_slice(sl, top_k=3)
        assert null_score == pytest.approx(18.0)
        assert cands[0].unit_span == (1, 1)  # second context unit: 2.0 + 4.0
        assert cands[0].score == pytest.approx(6.0)

    def test_empty_context_rejected(self):
        sl = make_slice([1.0], [1.0], null_index=0)
        with pytest.raises(DecodeError):
            decode_slice(sl)


class TestMergeSlices:
    def test_min_null(self):
        per_slice = [
            (0, [], 5.0),
            (1, [decode_slice(make_slice([1.0, 0], [1.0, 0]))[0][0]][0:0], 1.2),
            (2, [], 3.3),
        ]
        # give one slice a candidate so a span exists
        cands, _ = decode_slice(make_slice([2.0, 0.0], [2.0, 0.0]))
        per_slice[0] = (0, cands, 5.0)
        pred = merge_slices(per_slice, setup=1, example_id="e")
        assert pred.null_score == pytest.approx(1.2)

    def test_setup2_span_beats_null(self):
        cands, _ = decode_slice(make_slice([2.0, 0.0], [2.0, 0.0]))
        pred = merge_slices([(0, cands, 1.2)], setup=2, example_id="e")
        assert pred.span is not None
        assert pred.score == pytest.approx(4.0)

    def test_setup2_null_wins_strictly(self):
        cands, _ = decode_slice(make_slice([1.0, 0.0], [1.0, 0.0]))
        pred = merge_slices([(0, cands, 5.0)], setup=2, example_id="e")
        assert pred.span is None

    def test_setup2_span_wins_ties(self):
        cands, _ = decode_slice(make_slice([1.0, 0.0], [1.0, 0.0]))
        pred = merge_slices([(0, cands, 2.0)], setup=2, example_id="e")
        assert pred.span is not None

    def test_setup1_ignores_null(self):
        cands, _ = decode_slice(make_slice([-5.0, 9.0], [-5.0, 9.0]))
        pred = merge_slices([(0, cands, 18.0)], setup=1, example_id="e")
        assert pred.span is not None

    def test_single_slice_identity(self):
        sl = make_slice([0.3, 1.7, 0.2, 0.0], [0.4, 2.2, 0.1, 0.0])
        cands, null = decode_slice(sl)
        pred = merge_slices([(0, cands, null)], setup=1, example_id="e")
        assert pred.span == cands[0].char_span
        assert pred.score == cands[0].score
        assert pred.null_score == null


def random_sheet(rng, max_slices=4, max_units=40, index_offset_chars=True):
    slices = []
    offset = 0
    for i in range(rng.randint(1, max_slices)):
        n = rng.randint(1, max_units)
        start = [rng.uniform(-5, 5) for _ in range(n + 1)]
        end = [rng.uniform(-5, 5) for _ in range(n + 1)]
        slices.append(make_slice(start, end, index=i, offset=offset))
        offset += 2 * n + 10
    return LogitSheet(example_id="r", slices=tuple(slices))


class TestBruteForceEquivalence:
    def test_random_instances(self):
        rng = random.Random(1234)
        for _ in range(300):
            sheet = random_sheet(rng)
            cap = rng.choice([None, 1, 2, 5])
            pred = decode_sheet(sheet, setup=1, max_span_units=cap)
            span, score, null = brute_force(sheet.slices, max_span_units=cap)
            assert pred.span == span
            assert pred.score == pytest.approx(score, abs=1e-12)
            assert pred.null_score == pytest.approx(null, abs=1e-12)

    def test_setup2_agrees_with_enumeration(self):
        rng = random.Random(99)
        for _ in range(200):
            sheet = random_sheet(rng)
            pred = decode_sheet(sheet, setup=2)
            span, score, null = brute_force(sheet.slices)
            if null > score:
                assert pred.span is None
            else:
                assert pred.span == span


@given(st.integers(0, 10_000), st.floats(-10, 10))
@settings(max_examples=50, deadline=None)
def test_monotonicity_under_constant_shift(seed, c):
    rng = random.Random(seed)
    sheet = random_sheet(rng, max_slices=2, max_units=10)
    shifted = LogitSheet(
        example_id="r",
        slices=tuple(
            SheetSlice(
                slice_index=sl.slice_index,
                start_logits=tuple(x + c for x in sl.start_logits),
                end_logits=tuple(x + c for x in sl.end_logits),
                unit_char_spans=sl.unit_char_spans,
                null_index=sl.null_index,
            )
            for sl in sheet.slices
        ),
    )
    p1 = decode_sheet(sheet, setup=1)
    p2 = decode_sheet(shifted, setup=1)
    assert p1.span == p2.span
    assert p2.score == pytest.approx(p1.score + 2 * c, abs=1e-9)
    assert p2.null_score == pytest.approx(p1.null_score + 2 * c, abs=1e-9)


def test_tie_breaking_determinism():
    # all-equal logits: earliest start, then shortest span must win
    sl = make_slice([0.0] * 6, [0.0] * 6)
    cands, _ = decode_slice(sl, top_k=3)
    assert cands[0].unit_span == (0, 0)
    for _ in range(5):
        again, _ = decode_slice(sl, top_k=3)
        assert [c.unit_span for c in again] == [c.unit_span for c in cands]


class TestDecodeAll:
    def _examples_and_sheets(self):
        rng = random.Random(5)
        examples = [simple_example("q", "", example_id=f"e{i}") for i in range(3)]
        sheets = {ex.example_id: random_sheet(rng) for ex in examples}
        for ex_id in sheets:
            sheets[ex_id] = LogitSheet(example_id=ex_id, slices=sheets[ex_id].slices)
        return examples, sheets

    def test_all_present(self):
        examples, sheets = self._examples_and_sheets()
        run = decode_all(examples, sheets, {}, setup=1)
        assert len(run.predictions) == 3
        assert run.skipped == []

    def test_missing_sheet_counted(self):
        examples, sheets = self._examples_and_sheets()
        del sheets["e1"]
        run = decode_all(examples, sheets, {}, setup=1)
        assert len(run.predictions) == 2
        assert run.skipped == ["e1"]


class TestMockScorer:
    def _decode(self, query, text, setup=1):
        ex = simple_example(query, text, example_id="m1")
        units = word_unit_map(text)
        ss = slice_document(ex, units, make_budget(8), overlap=2)
        sheet = mock_lexical_scorer(ex, ss, text)
        return decode_sheet(sheet, setup=setup, document_text=text)

    def test_verbatim_query_found(self):
        text = "eka rivi tässä. kissa istui matolla. viimeinen rivi."
        pred = self._decode("kissa istui matolla", text)
        assert pred.text.strip(" .") == "kissa istui matolla"

    def test_disjoint_query_yields_null_in_setup2(self):
        text = "aamu katu meri lumi"
        pred = self._decode("xyz abc", text, setup=2)
        assert pred.span is None

    def test_empty_query_rejected(self):
        with pytest.raises(DecodeError):
            self._decode("...", "aamu katu meri")


def test_sheet_jsonl_round_trip(tmp_path):
    rng = random.Random(7)
    sheet = LogitSheet(example_id="rt", slices=random_sheet(rng).slices)
    path = tmp_path / "sheets.jsonl"
    write_jsonl(path, sheet_records(sheet))
    loaded = read_logit_sheets(path)
    assert set(loaded) == {"rt"}
    assert loaded["rt"].slices == sheet.slices
