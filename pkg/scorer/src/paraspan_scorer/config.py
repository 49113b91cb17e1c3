from __future__ import annotations

from dataclasses import dataclass


class ScorerError(Exception):
    pass


@dataclass(frozen=True)
class ScorerConfig:
    """Settings shared by scoring and training.

    max_sequence_units must equal the --max-seq used when the slices
    were exported; a slice that does not fit is a hard error, never a
    silent truncation.
    """

    max_sequence_units: int = 512
    batch_size: int = 32
    learning_rate: float = 3e-5
    epochs: int = 2
    device: str = "cpu"
    seed: int = 0

    def __post_init__(self):
        if self.max_sequence_units < 8:
            raise ScorerError("max_sequence_units too small for [CLS] q [SEP] c [SEP]")
