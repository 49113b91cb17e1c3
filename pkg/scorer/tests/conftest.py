import pytest

from paraspan_scorer.config import ScorerConfig
from paraspan_scorer.synth import generate
from paraspan_scorer.train import train_toy_model

CONFIG = ScorerConfig(max_sequence_units=64, batch_size=32, seed=0)


@pytest.fixture(scope="session")
def toy():
    """(model, tokenizer) trained once per session on the synthetic language."""
    train = generate(800, seed=1)
    model, tokenizer = train_toy_model(train, CONFIG, epochs=30, learning_rate=1e-3)
    return model, tokenizer


@pytest.fixture(scope="session")
def held_examples():
    return generate(60, seed=999, prefix="held")


@pytest.fixture
def config():
    return CONFIG
