"""Answer-tagged encoder with a pointer-generator decoder.

Encoder: token + position + answer-type embeddings summed, then post-norm
bidirectional transformer blocks. No classification or separator tokens;
the answer region is communicated purely through the 0/1 type channel.

Decoder: token + position embeddings through a causally masked LM stack,
then cross blocks that each compute

    A_S = LN(MHA(Y, Y, Y) + Y)        causal self-attention
    A_C = LN(MHA(A_S, H, H) + A_S)    attention over encoder states H
    O   = LN(FFN(A_C) + A_C)

A logistic gate on [Y_t; A_C_t] (Y taken after the LM stack) mixes the
vocabulary softmax with a copy distribution read off the final cross
block's attention weights averaged over heads. Sharing one subword
vocabulary between encoder and decoder is what lets the copy mass land on
real output token ids.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from . import numerics as nm
from .numerics import ConfigError, Tensor

CHECKPOINT_FORMAT = "sqgen-checkpoint"
CHECKPOINT_VERSION = 1


class ContextTooLong(ValueError):
    """Context exceeds the configured encoder position table."""


class QuestionTooLong(ValueError):
    """Decoder prefix exceeds the configured position table."""


class CheckpointError(ValueError):
    """Checkpoint file is malformed or inconsistent with its manifest."""


@dataclass
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    encoder_layers: int = 2
    decoder_lm_layers: int = 2
    cross_layers: int = 2
    ffn_dim: int = 128
    max_context: int = 500
    max_question: int = 50
    use_pointer: bool = True
    use_decoder_lm: bool = True
    use_type_ids: bool = True

    def __post_init__(self) -> None:
        if self.vocab_size < 5:
            raise ConfigError("vocab_size must cover the four specials")
        if self.d_model % self.n_heads != 0:
            raise ConfigError(
                f"d_model={self.d_model} not divisible by n_heads={self.n_heads}"
            )
        for name in ("encoder_layers", "decoder_lm_layers"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.cross_layers < 1:
            raise ConfigError("cross_layers must be >= 1 (the copy path reads them)")
        if self.max_context < 1 or self.max_question < 1:
            raise ConfigError("max_context and max_question must be >= 1")

    @classmethod
    def full_scale(cls, vocab_size: int = 30522) -> "ModelConfig":
        """Full-size preset: 12-layer stacks, 12 heads, 3072-wide FFNs."""
        return cls(
            vocab_size=vocab_size,
            d_model=768,
            n_heads=12,
            encoder_layers=12,
            decoder_lm_layers=12,
            cross_layers=2,
            ffn_dim=3072,
        )


@dataclass
class EncodedContext:
    h: Tensor
    context_ids: np.ndarray


@dataclass
class DecoderStepOutput:
    """Everything the final decode position produced, as plain arrays."""

    a_s: np.ndarray
    a_c: np.ndarray
    o: np.ndarray
    p_gen: float
    vocab_dist: np.ndarray
    copy_attn: np.ndarray
    final_dist: np.ndarray


def init_params(config: ModelConfig, seed: int = 0) -> dict[str, Tensor]:
    """Fresh parameters: N(0, 0.02) weights, zero biases, unit LN gains.

    Creation order is fixed, so a given seed always yields the same bytes.
    """
    rng = np.random.default_rng(seed)
    params: dict[str, Tensor] = {}

    def w(name: str, shape: tuple[int, ...]) -> None:
        params[name] = Tensor(rng.normal(0.0, 0.02, shape), requires_grad=True)

    def b(name: str, shape: tuple[int, ...]) -> None:
        params[name] = Tensor(np.zeros(shape), requires_grad=True)

    def ln(prefix: str, dim: int) -> None:
        params[f"{prefix}.g"] = Tensor(np.ones(dim), requires_grad=True)
        params[f"{prefix}.b"] = Tensor(np.zeros(dim), requires_grad=True)

    d, f = config.d_model, config.ffn_dim

    def attn(prefix: str) -> None:
        for part in ("wq", "wk", "wv", "wo"):
            w(f"{prefix}.{part}", (d, d))
        for part in ("bq", "bk", "bv", "bo"):
            b(f"{prefix}.{part}", (d,))

    def ffn(prefix: str) -> None:
        w(f"{prefix}.w1", (d, f))
        b(f"{prefix}.b1", (f,))
        w(f"{prefix}.w2", (f, d))
        b(f"{prefix}.b2", (d,))

    def block(prefix: str) -> None:
        attn(f"{prefix}.attn")
        ln(f"{prefix}.ln1", d)
        ffn(f"{prefix}.ffn")
        ln(f"{prefix}.ln2", d)

    w("enc.word_emb", (config.vocab_size, d))
    w("enc.pos_emb", (config.max_context, d))
    if config.use_type_ids:
        w("enc.type_emb", (2, d))
    for i in range(config.encoder_layers):
        block(f"enc.b{i}")

    w("dec.word_emb", (config.vocab_size, d))
    w("dec.pos_emb", (config.max_question + 1, d))
    if config.use_decoder_lm:
        for i in range(config.decoder_lm_layers):
            block(f"lm.b{i}")

    for i in range(config.cross_layers):
        attn(f"cross.b{i}.self")
        ln(f"cross.b{i}.ln1", d)
        attn(f"cross.b{i}.xattn")
        ln(f"cross.b{i}.ln2", d)
        ffn(f"cross.b{i}.ffn")
        ln(f"cross.b{i}.ln3", d)

    w("out.w", (d, config.vocab_size))
    b("out.b", (config.vocab_size,))
    if config.use_pointer:
        w("gate.w", (2 * d, 1))
        b("gate.b", (1,))
    return params


def _mha(params: Mapping[str, Tensor], prefix: str, q, k, v, n_heads, mask=None):
    p = lambda name: params[f"{prefix}.{name}"]
    return nm.multi_head_attention(
        q, k, v,
        p("wq"), p("bq"), p("wk"), p("bk"), p("wv"), p("bv"), p("wo"), p("bo"),
        n_heads=n_heads, mask=mask,
    )


def _ffn(params: Mapping[str, Tensor], prefix: str, x: Tensor) -> Tensor:
    h = nm.gelu(nm.linear(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"]))
    return nm.linear(h, params[f"{prefix}.w2"], params[f"{prefix}.b2"])


def _block(params, prefix: str, x: Tensor, n_heads: int, mask=None) -> Tensor:
    a, _ = _mha(params, f"{prefix}.attn", x, x, x, n_heads, mask)
    h = nm.layer_norm(a + x, params[f"{prefix}.ln1.g"], params[f"{prefix}.ln1.b"])
    f = _ffn(params, f"{prefix}.ffn", h)
    return nm.layer_norm(f + h, params[f"{prefix}.ln2.g"], params[f"{prefix}.ln2.b"])


class BertPgn:
    """The trainable question generator: config + named parameter tensors."""

    def __init__(
        self,
        config: ModelConfig,
        params: dict[str, Tensor] | None = None,
        seed: int = 0,
    ):
        self.config = config
        self.params = params if params is not None else init_params(config, seed)

    # decoding protocol
    @property
    def vocab_size(self) -> int:
        return self.config.vocab_size

    # -- encoder ---------------------------------------------------------

    def embed_inputs(self, context_ids, type_ids) -> Tensor:
        """Sum of token, position, and (optionally) answer-type embeddings."""
        ids = np.asarray(context_ids, dtype=np.intp)
        types = np.asarray(type_ids, dtype=np.intp)
        if ids.shape != types.shape:
            raise ConfigError(
                f"context_ids ({ids.shape}) and type_ids ({types.shape}) differ"
            )
        if ids.size == 0:
            raise ConfigError("empty context")
        if ids.size > self.config.max_context:
            raise ContextTooLong(
                f"context of {ids.size} exceeds max_context={self.config.max_context}"
            )
        if np.any((types != 0) & (types != 1)):
            raise ConfigError("type_ids must be 0 or 1")
        e = nm.embedding(self.params["enc.word_emb"], ids) + nm.embedding(
            self.params["enc.pos_emb"], np.arange(ids.size)
        )
        if self.config.use_type_ids:
            e = e + nm.embedding(self.params["enc.type_emb"], types)
        return e

    def encode(self, embedded: Tensor) -> Tensor:
        x = embedded
        for i in range(self.config.encoder_layers):
            x = _block(self.params, f"enc.b{i}", x, self.config.n_heads)
        return x

    def encode_context(self, context_ids, type_ids) -> EncodedContext:
        h = self.encode(self.embed_inputs(context_ids, type_ids))
        return EncodedContext(h=h, context_ids=np.asarray(context_ids, dtype=np.intp))

    # -- decoder ---------------------------------------------------------

    def _decoder_trace(self, prefix_ids, h_enc: Tensor):
        """Run the full decoder over a prefix; returns per-position tensors
        (y_lm, a_s, a_c, o of the final cross block, and its attention)."""
        ids = np.asarray(prefix_ids, dtype=np.intp)
        t = ids.size
        if t == 0:
            raise ConfigError("decoder prefix must start with BOS")
        if t > self.config.max_question + 1:
            raise QuestionTooLong(
                f"prefix of {t} exceeds max_question+1={self.config.max_question + 1}"
            )
        y = nm.embedding(self.params["dec.word_emb"], ids) + nm.embedding(
            self.params["dec.pos_emb"], np.arange(t)
        )
        mask = nm.causal_mask(t)
        if self.config.use_decoder_lm:
            for i in range(self.config.decoder_lm_layers):
                y = _block(self.params, f"lm.b{i}", y, self.config.n_heads, mask)

        x = y
        a_s = a_c = x
        attn = None
        for i in range(self.config.cross_layers):
            pre = f"cross.b{i}"
            s, _ = _mha(self.params, f"{pre}.self", x, x, x, self.config.n_heads, mask)
            a_s = nm.layer_norm(s + x, self.params[f"{pre}.ln1.g"], self.params[f"{pre}.ln1.b"])
            c, attn = _mha(self.params, f"{pre}.xattn", a_s, h_enc, h_enc, self.config.n_heads)
            a_c = nm.layer_norm(c + a_s, self.params[f"{pre}.ln2.g"], self.params[f"{pre}.ln2.b"])
            f = _ffn(self.params, f"{pre}.ffn", a_c)
            x = nm.layer_norm(f + a_c, self.params[f"{pre}.ln3.g"], self.params[f"{pre}.ln3.b"])
        if attn is None:
            raise ConfigError("cross_layers must be >= 1 for decoding")
        return y, a_s, a_c, x, attn

    def sequence_distributions(self, prefix_ids, enc: EncodedContext) -> Tensor:
        """Mixture distribution at every prefix position, in-graph (T,V)."""
        y, _, a_c, o, attn = self._decoder_trace(prefix_ids, enc.h)
        vocab_dist = nm.softmax(
            nm.linear(o, self.params["out.w"], self.params["out.b"]), axis=-1
        )
        if not self.config.use_pointer:
            return vocab_dist
        gate_in = nm.concat([y, a_c], axis=-1)
        p_gen = nm.sigmoid(nm.linear(gate_in, self.params["gate.w"], self.params["gate.b"]))
        copy = nm.mean(attn, axis=0)  # (T, L) heads averaged
        copy_vocab = nm.scatter_to_vocab(copy, enc.context_ids, self.config.vocab_size)
        return p_gen * vocab_dist + (1.0 - p_gen) * copy_vocab

    def decode_step(self, prefix_ids, enc: EncodedContext) -> DecoderStepOutput:
        """One inference step: distributions for the position after the prefix."""
        with nm.no_grad():
            y, a_s, a_c, o, attn = self._decoder_trace(prefix_ids, enc.h)
            vocab_dist = nm.softmax(
                nm.linear(o, self.params["out.w"], self.params["out.b"]), axis=-1
            ).data[-1]
            copy_attn = attn.data[:, -1, :].mean(axis=0)
            if self.config.use_pointer:
                p_gen = float(
                    self.generation_gate(
                        Tensor(y.data[-1]), Tensor(a_c.data[-1])
                    ).item()
                )
            else:
                p_gen = 1.0
        step = DecoderStepOutput(
            a_s=a_s.data[-1].copy(),
            a_c=a_c.data[-1].copy(),
            o=o.data[-1].copy(),
            p_gen=p_gen,
            vocab_dist=vocab_dist.copy(),
            copy_attn=copy_attn.copy(),
            final_dist=np.empty(0),
        )
        step.final_dist = output_distribution(step, enc.context_ids)
        return step

    def generation_gate(self, y_t: Tensor, a_c_t: Tensor) -> Tensor:
        """p_gen = logistic(w . [y_t; a_c_t] + b), a scalar tensor."""
        row = nm.reshape(nm.concat([y_t, a_c_t], axis=0), (1, 2 * self.config.d_model))
        z = nm.linear(row, self.params["gate.w"], self.params["gate.b"])
        return nm.reshape(nm.sigmoid(z), ())

    def next_distribution(self, enc: EncodedContext, prefix_ids) -> np.ndarray:
        return self.decode_step(prefix_ids, enc).final_dist

    # -- persistence -------------------------------------------------------

    def save(self, path: str) -> None:
        save_checkpoint(path, self.config, self.params)

    @classmethod
    def from_checkpoint(cls, path: str) -> "BertPgn":
        config, arrays = load_checkpoint(path)
        params = {k: Tensor(v, requires_grad=True) for k, v in arrays.items()}
        return cls(config, params=params)


def output_distribution(step: DecoderStepOutput, context_ids) -> np.ndarray:
    """Mix the vocabulary and copy distributions:
    p_gen * vocab + (1 - p_gen) * scatter(copy_attn onto context token ids).
    """
    ids = np.asarray(context_ids, dtype=np.intp)
    copy_vocab = np.zeros_like(step.vocab_dist)
    np.add.at(copy_vocab, ids, step.copy_attn)
    return step.p_gen * step.vocab_dist + (1.0 - step.p_gen) * copy_vocab


# -- checkpoint container ------------------------------------------------------


def save_checkpoint(
    path: str, config: ModelConfig, params: Mapping[str, Tensor | np.ndarray]
) -> None:
    """Self-describing single file: one JSON manifest line, then the raw
    little-endian float64 arrays concatenated in manifest order."""
    names = sorted(params)
    arrays = {
        n: (params[n].data if isinstance(params[n], Tensor) else np.asarray(params[n]))
        for n in names
    }
    manifest = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": asdict(config),
        "arrays": [{"name": n, "shape": list(arrays[n].shape)} for n in names],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(manifest, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for n in names:
            fh.write(np.ascontiguousarray(arrays[n], dtype="<f8").tobytes())


def load_checkpoint(path: str, config_cls=None):
    """Read a checkpoint back; config_cls picks the config dataclass to
    rebuild (the generator's ModelConfig by default)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head, sep, blob = raw.partition(b"\n")
    if not sep:
        raise CheckpointError(f"{path}: missing manifest line")
    try:
        manifest = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable manifest") from exc
    if manifest.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    try:
        config = (config_cls or ModelConfig)(**manifest["config"])
    except TypeError as exc:
        raise CheckpointError(f"{path}: config does not fit the expected model") from exc
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for entry in manifest["arrays"]:
        shape = tuple(int(s) for s in entry["shape"])
        n_bytes = int(np.prod(shape)) * 8 if shape else 8
        chunk = blob[offset : offset + n_bytes]
        if len(chunk) != n_bytes:
            raise CheckpointError(f"{path}: truncated blob at {entry['name']}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
        offset += n_bytes
    if offset != len(blob):
        raise CheckpointError(f"{path}: {len(blob) - offset} trailing bytes")
    return config, arrays
