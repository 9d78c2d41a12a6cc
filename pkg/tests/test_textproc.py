from __future__ import annotations

import numpy as np
import pytest

from sqgen import textproc
from sqgen.textproc import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    UNK_ID,
    InvalidCorpus,
    InvalidSize,
    InvalidTokenId,
    decode,
    encode,
    load_vocab,
    save_vocab,
    train_vocab,
)


class TestTrainVocab:
    def test_specials_occupy_first_four_ids(self, tiny_vocab):
        assert tiny_vocab.tokens[:4] == ["[PAD]", "[UNK]", "[BOS]", "[EOS]"]
        assert (PAD_ID, UNK_ID, BOS_ID, EOS_ID) == (0, 1, 2, 3)

    def test_ids_contiguous_and_invertible(self, tiny_vocab):
        for i, tok in enumerate(tiny_vocab.tokens):
            assert tiny_vocab.id_of[tok] == i

    def test_single_merge_is_highest_frequency_pair(self):
        # alphabet {a, b, word-initial a} + 4 specials + 1 merge slot
        vocab = train_vocab(["aaab", "aaab"], target_size=8)
        assert vocab.merges == [("a", "a")]

    def test_size_at_alphabet_floor_forces_zero_merges(self):
        vocab = train_vocab(["aa aa ab"], target_size=4 + 3)
        assert vocab.merges == []
        assert len(vocab) == 7

    def test_single_symbol_corpus(self):
        vocab = train_vocab(["z"], target_size=5)
        assert len(vocab) == 5
        assert vocab.tokens[4] == "▁z"

    def test_vocab_never_exceeds_target(self):
        vocab = train_vocab(["the cat sat on the mat"] * 3, target_size=30)
        assert len(vocab) <= 30

    def test_deterministic(self):
        corpus = ["some words repeat some words", "words repeat again"]
        a = train_vocab(corpus, target_size=40)
        b = train_vocab(corpus, target_size=40)
        assert a.tokens == b.tokens
        assert a.merges == b.merges

    def test_empty_corpus_rejected(self):
        with pytest.raises(InvalidCorpus):
            train_vocab([], target_size=10)
        with pytest.raises(InvalidCorpus):
            train_vocab(["   ", ""], target_size=10)

    def test_undersized_target_rejected(self):
        with pytest.raises(InvalidSize):
            train_vocab(["abcdefg"], target_size=6)

    def test_lowercases_by_default(self):
        vocab = train_vocab(["The Cat"], target_size=30)
        assert all(tok == tok.lower() for tok in vocab.tokens[4:])


class TestEncode:
    def test_empty_string(self, tiny_vocab):
        assert encode("", tiny_vocab) == []

    def test_unknown_character_maps_to_unk(self, tiny_vocab):
        assert encode("é", tiny_vocab) == [UNK_ID]

    def test_ids_in_range_and_no_specials(self, tiny_vocab):
        rng = np.random.default_rng(42)
        words = ["the", "cat", "dog", "capital", "water", "story"]
        for _ in range(20):
            text = " ".join(rng.choice(words, size=rng.integers(1, 8)))
            ids = encode(text, tiny_vocab)
            assert all(0 <= i < len(tiny_vocab) for i in ids)
            assert not any(i in (PAD_ID, BOS_ID, EOS_ID) for i in ids)

    def test_case_insensitive(self, tiny_vocab):
        assert encode("The CAT", tiny_vocab) == encode("the cat", tiny_vocab)


class TestDecode:
    def test_empty(self, tiny_vocab):
        assert decode([], tiny_vocab) == ""

    def test_specials_render_empty(self, tiny_vocab):
        assert decode([BOS_ID, EOS_ID], tiny_vocab) == ""
        assert decode([PAD_ID], tiny_vocab) == ""

    def test_round_trip(self, tiny_vocab):
        for text in [
            "the cat sat on the mat",
            "paris is the capital of france",
            "where did the dog go",
            "a bird can fly",
        ]:
            assert decode(encode(text, tiny_vocab), tiny_vocab) == text

    def test_round_trip_normalizes_whitespace(self, tiny_vocab):
        assert decode(encode("  the   cat  ", tiny_vocab), tiny_vocab) == "the cat"

    def test_out_of_range_id_rejected(self, tiny_vocab):
        with pytest.raises(InvalidTokenId):
            decode([len(tiny_vocab)], tiny_vocab)
        with pytest.raises(InvalidTokenId):
            decode([-1], tiny_vocab)


class TestSaveLoad:
    def test_file_round_trip(self, tiny_vocab, tmp_path):
        path = tmp_path / "vocab.txt"
        save_vocab(tiny_vocab, str(path))
        loaded = load_vocab(str(path))
        assert loaded.tokens == tiny_vocab.tokens
        assert loaded.merges == tiny_vocab.merges
        text = "the capital of france"
        assert encode(text, loaded) == encode(text, tiny_vocab)

    def test_loaded_vocab_decodes_identically(self, tiny_vocab, tmp_path):
        path = tmp_path / "vocab.txt"
        save_vocab(tiny_vocab, str(path))
        loaded = load_vocab(str(path))
        ids = encode("the dog ran to the park", tiny_vocab)
        assert decode(ids, loaded) == decode(ids, tiny_vocab)
