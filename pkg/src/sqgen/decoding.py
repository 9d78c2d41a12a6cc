"""Search and sampling strategies over a next-token-distribution model.

All three strategies speak to the model through one protocol: an object with
`vocab_size` and `next_distribution(context, prefix_ids) -> (V,) probabilities`.
Prefixes always start with BOS; a hypothesis finishes by emitting EOS.
Every tie anywhere breaks toward the lowest token id, so decoding is a pure
function of (model, context, arguments).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .textproc import BOS_ID, EOS_ID

DEFAULT_BEAM = 3
DEFAULT_TOP_P = 0.9
DEFAULT_TEMPERATURE = 0.1
GREEDY_TEMPERATURE = 1e-6  # at or below this, sampling collapses to argmax


class InvalidDecodeConfig(ValueError):
    """beam/top_p/temperature/max_len out of their documented ranges."""


@dataclass
class Hypothesis:
    ids: list[int] = field(default_factory=lambda: [BOS_ID])
    logprob: float = 0.0
    finished: bool = False

    def normalized(self) -> float:
        """Log probability per generated token (BOS excluded)."""
        return self.logprob / max(1, len(self.ids) - 1)


def _argmax_lowest(dist: np.ndarray) -> int:
    return int(np.argmax(dist))  # argmax returns the first (lowest id) max


def greedy(model, context, max_len: int = 50) -> Hypothesis:
    """Follow the argmax token by token until EOS or the length cap."""
    if max_len < 0:
        raise InvalidDecodeConfig(f"max_len must be >= 0, got {max_len}")
    hyp = Hypothesis()
    for _ in range(max_len):
        dist = model.next_distribution(context, hyp.ids)
        tok = _argmax_lowest(dist)
        with np.errstate(divide="ignore"):
            hyp.logprob += float(np.log(dist[tok]))
        hyp.ids.append(tok)
        if tok == EOS_ID:
            hyp.finished = True
            break
    return hyp


def beam_search(
    model,
    context,
    beam: int = DEFAULT_BEAM,
    max_len: int = 50,
    length_normalize: bool = True,
) -> list[Hypothesis]:
    """Breadth-limited search; returns every kept hypothesis, best first.

    Pruning always uses the raw cumulative log probability; the
    length_normalize flag only changes the final ranking.
    """
    if beam < 1:
        raise InvalidDecodeConfig(f"beam must be >= 1, got {beam}")
    if max_len < 0:
        raise InvalidDecodeConfig(f"max_len must be >= 0, got {max_len}")

    live = [Hypothesis()]
    finished: list[Hypothesis] = []
    for _ in range(max_len):
        if not live:
            break
        candidates: list[tuple[float, int, int]] = []
        for parent_idx, hyp in enumerate(live):
            dist = model.next_distribution(context, hyp.ids)
            with np.errstate(divide="ignore"):
                logp = np.log(dist)
            for tok in range(len(dist)):
                candidates.append((hyp.logprob + float(logp[tok]), parent_idx, tok))
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
        next_live: list[Hypothesis] = []
        for score, parent_idx, tok in candidates[:beam]:
            if score == -np.inf:
                continue
            parent = live[parent_idx]
            child = Hypothesis(parent.ids + [tok], score, tok == EOS_ID)
            (finished if child.finished else next_live).append(child)
        live = next_live

    pool = finished + live
    rank = (
        (lambda h: (-h.normalized(), h.ids))
        if length_normalize
        else (lambda h: (-h.logprob, h.ids))
    )
    pool.sort(key=rank)
    return pool


def sample_step(
    dist: np.ndarray, top_p: float, temperature: float, rng: np.random.Generator
) -> int:
    """Draw one token: temperature-sharpen, keep the smallest set of tokens
    whose mass reaches top_p, renormalize, sample."""
    if not 0.0 < top_p <= 1.0:
        raise InvalidDecodeConfig(f"top_p must be in (0,1], got {top_p}")
    if temperature < 0.0:
        raise InvalidDecodeConfig(f"temperature must be >= 0, got {temperature}")
    if temperature <= GREEDY_TEMPERATURE:
        return _argmax_lowest(dist)

    logits = np.log(np.maximum(dist, 1e-300)) / temperature
    logits -= logits.max()
    p = np.exp(logits)
    p /= p.sum()

    order = np.lexsort((np.arange(p.size), -p))  # descending prob, ties to low id
    cum = np.cumsum(p[order])
    keep = int(np.searchsorted(cum, top_p)) + 1
    keep = min(keep, p.size)
    kept = order[:keep]
    kept_p = p[kept]
    kept_p /= kept_p.sum()
    draw = rng.random()
    idx = int(np.searchsorted(np.cumsum(kept_p), draw))
    return int(kept[min(idx, keep - 1)])


def nucleus_sample(
    model,
    context,
    top_p: float = DEFAULT_TOP_P,
    temperature: float = DEFAULT_TEMPERATURE,
    seed: int = 0,
    max_len: int = 50,
) -> Hypothesis:
    """Seeded nucleus sampling; logprob records the model's own (unfiltered)
    probability of the sampled sequence."""
    if max_len < 0:
        raise InvalidDecodeConfig(f"max_len must be >= 0, got {max_len}")
    rng = np.random.default_rng(seed)
    hyp = Hypothesis()
    for _ in range(max_len):
        dist = model.next_distribution(context, hyp.ids)
        tok = sample_step(dist, top_p, temperature, rng)
        with np.errstate(divide="ignore"):
            hyp.logprob += float(np.log(dist[tok]))
        hyp.ids.append(tok)
        if tok == EOS_ID:
            hyp.finished = True
            break
    return hyp
