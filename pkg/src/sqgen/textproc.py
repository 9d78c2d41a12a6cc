"""Subword vocabulary training and reversible tokenization.

Encoder and decoder share one vocabulary, so a context token and the
generated token it copies to always carry the same id. Word boundaries are
marked with a prefix marker on the first subword of each word, which makes
decoding a pure string operation (join, swap markers for spaces, strip).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

PAD_ID = 0
UNK_ID = 1
BOS_ID = 2
EOS_ID = 3
SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[BOS]", "[EOS]")

# Prefix on word-initial subwords; rendered back to a space when decoding.
WORD_MARK = "▁"

MERGE_SENTINEL = "#MERGES"

DEFAULT_VOCAB_SIZE = 8000


class InvalidCorpus(ValueError):
    """Vocabulary training got an empty corpus."""


class InvalidSize(ValueError):
    """Requested vocabulary cannot hold the specials plus the alphabet."""


class InvalidTokenId(ValueError):
    """decode() received an id outside the vocabulary."""


@dataclass
class Vocab:
    """Token table plus the ordered merge list that produced it.

    tokens[i] is the string for id i; ids 0..3 are the specials. merges are
    applied in training order when encoding, so the table is part of the
    tokenizer's behavior, not just bookkeeping.
    """

    tokens: list[str]
    merges: list[tuple[str, str]]
    lowercase: bool = True
    id_of: dict[str, int] = field(init=False, repr=False)
    _merge_rank: dict[tuple[str, str], int] = field(init=False, repr=False)
    _word_cache: dict[str, list[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.id_of = {tok: i for i, tok in enumerate(self.tokens)}
        self._merge_rank = {pair: r for r, pair in enumerate(self.merges)}
        self._word_cache = {}

    def __len__(self) -> int:
        return len(self.tokens)


def _words(corpus: list[str], lowercase: bool) -> Counter[str]:
    counts: Counter[str] = Counter()
    for line in corpus:
        if lowercase:
            line = line.lower()
        counts.update(line.split())
    return counts


def _word_symbols(word: str) -> tuple[str, ...]:
    chars = list(word)
    chars[0] = WORD_MARK + chars[0]
    return tuple(chars)


def train_vocab(
    corpus: list[str], target_size: int = DEFAULT_VOCAB_SIZE, lowercase: bool = True
) -> Vocab:
    """Learn a byte-pair vocabulary of at most target_size entries.

    Greedy highest-frequency pair merging over whitespace-split words; ties
    are broken by the lexicographic order of the merged string, which makes
    training deterministic. Pair counts are maintained incrementally so the
    loop stays linear-ish in corpus size rather than rescanning per merge.
    """
    if not corpus:
        raise InvalidCorpus("corpus is empty")

    word_counts = _words(corpus, lowercase)
    if not word_counts:
        raise InvalidCorpus("corpus contains no words")
    words: list[list[str]] = []
    freqs: list[int] = []
    for word, freq in sorted(word_counts.items()):
        words.append(list(_word_symbols(word)))
        freqs.append(freq)

    alphabet = sorted({sym for w in words for sym in w})
    if target_size < len(SPECIAL_TOKENS) + len(alphabet):
        raise InvalidSize(
            f"target_size={target_size} cannot hold {len(SPECIAL_TOKENS)} specials "
            f"+ alphabet of {len(alphabet)}"
        )

    tokens = list(SPECIAL_TOKENS) + alphabet
    known = set(tokens)
    merges: list[tuple[str, str]] = []

    # pair -> total frequency, and pair -> indices of words containing it.
    pair_freq: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[int]] = {}
    for wi, w in enumerate(words):
        f = freqs[wi]
        for a, b in zip(w, w[1:]):
            pair_freq[(a, b)] += f
            pair_words.setdefault((a, b), set()).add(wi)

    while len(tokens) < target_size and pair_freq:
        best_freq = max(pair_freq.values())
        best = min(
            (p for p, f in pair_freq.items() if f == best_freq),
            key=lambda p: p[0] + p[1],
        )
        merged = best[0] + best[1]
        merges.append(best)
        if merged not in known:
            tokens.append(merged)
            known.add(merged)

        for wi in sorted(pair_words.get(best, ())):
            w = words[wi]
            f = freqs[wi]
            # Drop this word's old pair contributions, apply the merge, re-add.
            for a, b in zip(w, w[1:]):
                pair_freq[(a, b)] -= f
                if pair_freq[(a, b)] <= 0:
                    del pair_freq[(a, b)]
                ws = pair_words.get((a, b))
                if ws is not None:
                    ws.discard(wi)
                    if not ws:
                        del pair_words[(a, b)]
            new_w: list[str] = []
            j = 0
            while j < len(w):
                if j + 1 < len(w) and (w[j], w[j + 1]) == best:
                    new_w.append(merged)
                    j += 2
                else:
                    new_w.append(w[j])
                    j += 1
            words[wi] = new_w
            for a, b in zip(new_w, new_w[1:]):
                pair_freq[(a, b)] += f
                pair_words.setdefault((a, b), set()).add(wi)

    return Vocab(tokens=tokens, merges=merges, lowercase=lowercase)


def _apply_merges(symbols: list[str], rank: dict[tuple[str, str], int]) -> list[str]:
    while len(symbols) > 1:
        best_rank = None
        best_idx = -1
        for i, pair in enumerate(zip(symbols, symbols[1:])):
            r = rank.get(pair)
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
                best_idx = i
        if best_rank is None:
            break
        symbols = (
            symbols[:best_idx]
            + [symbols[best_idx] + symbols[best_idx + 1]]
            + symbols[best_idx + 2 :]
        )
    return symbols


def encode(text: str, vocab: Vocab) -> list[int]:
    """Tokenize text to ids; characters the vocabulary never saw become UNK."""
    if vocab.lowercase:
        text = text.lower()
    ids: list[int] = []
    for word in text.split():
        cached = vocab._word_cache.get(word)
        if cached is None:
            symbols = _apply_merges(list(_word_symbols(word)), vocab._merge_rank)
            cached = [vocab.id_of.get(sym, UNK_ID) for sym in symbols]
            vocab._word_cache[word] = cached
        ids.extend(cached)
    return ids


def decode(ids: list[int], vocab: Vocab) -> str:
    """Invert encode; special tokens render as nothing."""
    pieces: list[str] = []
    for i in ids:
        if not 0 <= i < len(vocab.tokens):
            raise InvalidTokenId(f"id {i} outside vocabulary of {len(vocab.tokens)}")
        if i in (PAD_ID, UNK_ID, BOS_ID, EOS_ID):
            continue
        pieces.append(vocab.tokens[i])
    return "".join(pieces).replace(WORD_MARK, " ").strip()


def save_vocab(vocab: Vocab, path: str) -> None:
    """Write one token per line (line number = id), then the merge table."""
    with open(path, "w", encoding="utf-8") as f:
        for tok in vocab.tokens:
            f.write(tok + "\n")
        f.write(MERGE_SENTINEL + "\n")
        for a, b in vocab.merges:
            f.write(f"{a} {b}\n")


def load_vocab(path: str, lowercase: bool = True) -> Vocab:
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        sentinel = lines.index(MERGE_SENTINEL)
    except ValueError as exc:
        raise InvalidCorpus(f"{path} has no {MERGE_SENTINEL} section") from exc
    tokens = lines[:sentinel]
    merges = [tuple(line.split(" ", 1)) for line in lines[sentinel + 1 :] if line]
    return Vocab(tokens=tokens, merges=[(a, b) for a, b in merges], lowercase=lowercase)
