"""Exact match and token-level F-score with null handling."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .textproc import normalized_sequence


@dataclass(frozen=True)
class ScoredExample:
    example_id: str
    prediction: Optional[str]
    gold: Optional[str]
    em: int
    f1: float


@dataclass(frozen=True)
class EvalReport:
    em_pct: float
    f1_pct: float
    n: int

    def to_json(self) -> dict:
        return {
            "em": round(self.em_pct, 2),
            "f1": round(self.f1_pct, 2),
            "n": self.n,
        }


def exact_match(
    prediction: Optional[str],
    gold: Optional[str],
    normalized: bool = True,
) -> int:
    """1 iff prediction and gold agree; null matches null.

    Normalized mode compares token sequences after punctuation removal
    and case folding; strict mode compares raw strings.
    """
    if prediction is None or gold is None:
        return int(prediction is None and gold is None)
    if not normalized:
        return int(prediction == gold)
    return int(normalized_sequence(prediction) == normalized_sequence(gold))


def token_f1(
    prediction: Optional[str],
    gold: Optional[str],
    normalized: bool = True,
) -> float:
    """Bag-of-tokens F over normalized token multisets.

    Both null -> 1.0; exactly one null -> 0.0; both sides normalizing to
    empty bags -> 1.0.
    """
    if prediction is None or gold is None:
        return float(prediction is None and gold is None)
    pred_bag = _bag(prediction, normalized)
    gold_bag = _bag(gold, normalized)
    if not pred_bag and not gold_bag:
        return 1.0
    if not pred_bag or not gold_bag:
        return 0.0
    common = sum((pred_bag & gold_bag).values())
    if common == 0:
        return 0.0
    precision = common / sum(pred_bag.values())
    recall = common / sum(gold_bag.values())
    return 2 * precision * recall / (precision + recall)


def _bag(text: str, normalized: bool) -> Counter:
    if normalized:
        return Counter(normalized_sequence(text))
    return Counter(text.split())


def score_example(
    example_id: str,
    prediction: Optional[str],
    gold: Optional[str],
    normalized: bool = True,
) -> ScoredExample:
    return ScoredExample(
        example_id=example_id,
        prediction=prediction,
        gold=gold,
        em=exact_match(prediction, gold, normalized=normalized),
        f1=token_f1(prediction, gold, normalized=normalized),
    )


def aggregate(scored: Iterable[ScoredExample]) -> EvalReport:
    scored = list(scored)
    if not scored:
        raise ValueError("cannot aggregate an empty evaluation")
    n = len(scored)
    em = 100.0 * sum(s.em for s in scored) / n
    f1 = 100.0 * sum(s.f1 for s in scored) / n
    return EvalReport(em_pct=em, f1_pct=f1, n=n)


def render_report(report: dict) -> str:
    """Human-readable table for a report JSON object."""
    lines = []
    overall = report.get("overall", {})
    lines.append(f"{'':24s} {'EM':>8s} {'F':>8s} {'n':>8s}")
    lines.append(
        f"{'overall':24s} {overall.get('em', 0):8.2f} "
        f"{overall.get('f1', 0):8.2f} {overall.get('n', 0):8d}"
    )
    for section in ("by_label", "by_genre"):
        rows = report.get(section)
        if not rows:
            continue
        lines.append(section)
        for key in sorted(rows):
            r = rows[key]
            lines.append(
                f"  {key:22s} {r['em']:8.2f} {r['f1']:8.2f} {r['n']:8d}"
            )
    cats = report.get("error_categories")
    if cats:
        lines.append("error_categories (% of errors)")
        for key in sorted(cats):
            lines.append(f"  {key:22s} {cats[key]:8.2f}")
    return "\n".join(lines)
