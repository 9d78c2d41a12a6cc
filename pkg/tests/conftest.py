from __future__ import annotations

import pytest

from sqgen import textproc


@pytest.fixture(scope="session")
def tiny_vocab() -> textproc.Vocab:
    corpus = [
        "the cat sat on the mat",
        "the dog ran to the park",
        "a bird can fly over water",
        "what did the cat see",
        "where did the dog go",
        "paris is the capital of france",
        "berlin is the capital of germany",
        "the end of the story",
    ]
    return textproc.train_vocab(corpus, target_size=120)
