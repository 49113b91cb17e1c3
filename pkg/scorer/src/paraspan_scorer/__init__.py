"""Neural adapters around the paraspan interchange formats.

Everything here talks to the span pipeline through files only: it
consumes the slice-export JSONL and emits LogitSheet, embedding, and
back-translation JSONL.
"""

__version__ = "0.1.0"

from .config import ScorerConfig, ScorerError  # noqa: F401
