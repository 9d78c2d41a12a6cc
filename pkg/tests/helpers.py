"""Shared builders for the test suite: tiny corpora, toy models, stub models."""

from __future__ import annotations

import numpy as np

from sqgen.corpus import PreparedExample
from sqgen.model import BertPgn, ModelConfig

TOY = dict(
    vocab_size=20,
    d_model=16,
    n_heads=2,
    encoder_layers=1,
    decoder_lm_layers=1,
    cross_layers=1,
    ffn_dim=32,
    max_context=16,
    max_question=8,
)


def toy_model(seed: int = 0, **overrides) -> BertPgn:
    return BertPgn(ModelConfig(**{**TOY, **overrides}), seed=seed)


def copy_task(
    n_examples: int,
    vocab_size: int = 30,
    min_len: int = 8,
    max_len: int = 12,
    min_span: int = 2,
    max_span: int = 4,
    seed: int = 42,
) -> list[PreparedExample]:
    """Synthetic task: the question is exactly the tagged context run."""
    rng = np.random.default_rng(seed)
    examples = []
    for i in range(n_examples):
        length = int(rng.integers(min_len, max_len + 1))
        context = rng.integers(4, vocab_size, size=length).tolist()
        span = int(rng.integers(min_span, max_span + 1))
        start = int(rng.integers(0, length - span + 1))
        types = [0] * length
        for j in range(start, start + span):
            types[j] = 1
        examples.append(
            PreparedExample(
                id=f"copy{i}",
                context_ids=context,
                type_ids=types,
                question_ids=context[start : start + span],
                answer_kind="short",
            )
        )
    return examples


class StubModel:
    """Protocol-only model for decoding tests: a deterministic random
    distribution for every (seed, prefix), full support, no special cases."""

    def __init__(self, vocab_size: int, seed: int = 0):
        self.vocab_size = vocab_size
        self.seed = seed

    def next_distribution(self, context, prefix_ids) -> np.ndarray:
        rng = np.random.default_rng([self.seed, len(prefix_ids), *prefix_ids])
        weights = rng.random(self.vocab_size) + 1e-3
        return weights / weights.sum()


class TiedStubModel(StubModel):
    """Every token equally likely: exercises lowest-id tie-breaking."""

    def next_distribution(self, context, prefix_ids) -> np.ndarray:
        return np.full(self.vocab_size, 1.0 / self.vocab_size)


# frozen 20-pair sentence suite for metric-oracle equivalence
METRIC_SUITE: list[tuple[str, str]] = [
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("the cat sat on the mat", "a cat was sitting on the mat"),
    ("the the the", "the cat"),
    ("a c e", "a b c d e"),
    ("completely different words here", "no overlap at all present"),
    ("one two three four", "one two three four five six"),
    ("one two three four five six", "one two three four"),
    ("repeated repeated repeated words", "repeated words repeated"),
    ("short", "short"),
    ("short", "a much longer reference sentence than that"),
    ("alpha beta gamma delta epsilon", "alpha gamma beta delta epsilon"),
    ("to be or not to be", "to be or not to be that is the question"),
    ("the quick brown fox jumps", "the quick brown dog jumps"),
    ("a a b b c c", "a b c a b c"),
    ("x y z", "z y x"),
    ("he said that she said", "she said that he said"),
    ("numbers one 2 three 4", "numbers one two three four"),
    ("same start different end", "same start another finish"),
    ("only one common token", "token"),
    ("a b c d e f g h", "a b c d e f g h i j"),
]
