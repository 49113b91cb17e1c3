"""Paraphrase span detection toolkit.

Converts paraphrase-in-context corpora into span retrieval examples,
slices long documents into overlapping windows, decodes spans from
externally produced start/end logits, runs sentence-level retrieval
baselines and computes EM / token-level F evaluation with error
breakdowns.
"""

__version__ = "0.1.0"
