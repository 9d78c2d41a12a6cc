"""Teacher-forced NLL training with Adam and perplexity-based selection.

The decoder input is BOS followed by the gold question; the targets are the
gold question followed by EOS, so the model must learn to terminate. Batches
are gradient-accumulated per example (equal example weight), which gives the
same averaged step as padded batching without any mask bookkeeping.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .corpus import DatasetSplit, PreparedExample
from .model import BertPgn, save_checkpoint
from .numerics import Tensor
from .textproc import BOS_ID, EOS_ID, PAD_ID


class InvalidTarget(ValueError):
    """Question is empty or contains PAD; nothing valid to teacher-force."""


class InvalidDataset(ValueError):
    """Perplexity over an empty dataset is undefined."""


class TrainingDiverged(ArithmeticError):
    """Loss became non-finite."""


@dataclass
class TrainConfig:
    lr: float = 5e-5
    batch_size: int = 10
    epochs: int = 20
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0


@dataclass
class AdamState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    dev_perplexity: float
    wall_seconds: float


@dataclass
class TrainResult:
    best_epoch: int
    best_dev_perplexity: float
    log: list[EpochLog]
    best_params: dict[str, np.ndarray]


def _teacher_forced(example: PreparedExample) -> tuple[list[int], list[int]]:
    q = example.question_ids
    if not q:
        raise InvalidTarget(f"example {example.id}: empty question")
    targets = list(q) + [EOS_ID]
    if PAD_ID in targets:
        raise InvalidTarget(f"example {example.id}: PAD in target")
    return [BOS_ID] + list(q), targets


def nll_loss(model: BertPgn, example: PreparedExample) -> Tensor:
    """Mean negative log likelihood of the gold question under the mixture."""
    prefix, targets = _teacher_forced(example)
    enc = model.encode_context(example.context_ids, example.type_ids)
    dist = model.sequence_distributions(prefix, enc)
    gold = nm.take_per_row(dist, np.asarray(targets, dtype=np.intp))
    return nm.neg(nm.mean(nm.log(gold)))


def adam_step(
    params: dict[str, Tensor],
    grads: dict[str, np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
) -> None:
    """One bias-corrected Adam update, in place."""
    state.step += 1
    t = state.step
    for name in sorted(params):
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(g)
            state.v[name] = np.zeros_like(g)
        m = state.m[name]
        v = state.v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1**t)
        v_hat = v / (1.0 - cfg.beta2**t)
        params[name].data -= cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)


def perplexity(model: BertPgn, examples: list[PreparedExample]) -> float:
    """exp of the token-weighted mean NLL over the dataset."""
    if not examples:
        raise InvalidDataset("perplexity over an empty dataset")
    total_nll = 0.0
    total_tokens = 0
    with nm.no_grad():
        for ex in examples:
            n = len(ex.question_ids) + 1  # + EOS
            total_nll += float(nll_loss(model, ex).item()) * n
            total_tokens += n
    return math.exp(total_nll / total_tokens)


def select_best(dev_perplexities: list[float]) -> int:
    """Index of the lowest dev perplexity; ties go to the earliest epoch."""
    return min(range(len(dev_perplexities)), key=lambda i: dev_perplexities[i])


def _epoch_seed(seed: int, epoch: int) -> int:
    return seed * 1_000_003 + epoch


def train(
    model: BertPgn,
    split: DatasetSplit,
    cfg: TrainConfig,
    checkpoint_dir: str | None = None,
    log_path: str | None = None,
) -> TrainResult:
    """Run the full loop; the model ends at the last epoch's parameters and
    the best (dev-perplexity) parameters come back as plain arrays.

    With checkpoint_dir set, every epoch is saved as epoch_NNN.ckpt and the
    winner is re-saved as best.ckpt.
    """
    if not split.train:
        raise InvalidDataset("empty training split")
    eval_set = split.dev if split.dev else split.train

    snapshot = lambda: {k: p.data.copy() for k, p in model.params.items()}
    best_params = snapshot()
    best_ppl = math.inf
    best_epoch = 0
    state = AdamState()
    log: list[EpochLog] = []

    for epoch in range(1, cfg.epochs + 1):
        t0 = time.monotonic()
        order = list(range(len(split.train)))
        random.Random(_epoch_seed(cfg.seed, epoch)).shuffle(order)

        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = [split.train[i] for i in order[start : start + cfg.batch_size]]
            try:
                losses = [nll_loss(model, ex) for ex in batch]
            except nm.NumericalError as exc:
                raise TrainingDiverged(f"epoch {epoch}: {exc}") from exc
            total = losses[0]
            for extra in losses[1:]:
                total = total + extra
            batch_loss = nm.mul(total, 1.0 / len(batch))
            if not np.isfinite(batch_loss.data).all():
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}")
            grads = nm.grad_map(batch_loss, model.params)
            adam_step(model.params, grads, state, cfg)
            epoch_loss += float(batch_loss.item()) * len(batch)
        train_loss = epoch_loss / len(order)

        dev_ppl = perplexity(model, eval_set)
        if not math.isfinite(dev_ppl):
            raise TrainingDiverged(f"non-finite dev perplexity at epoch {epoch}")
        wall = time.monotonic() - t0
        log.append(EpochLog(epoch, train_loss, dev_ppl, wall))

        if checkpoint_dir is not None:
            save_checkpoint(
                f"{checkpoint_dir}/epoch_{epoch:03d}.ckpt", model.config, model.params
            )
        if dev_ppl < best_ppl:
            best_ppl = dev_ppl
            best_epoch = epoch
            best_params = snapshot()

    if checkpoint_dir is not None:
        save_checkpoint(f"{checkpoint_dir}/best.ckpt", model.config, best_params)
    if log_path is not None:
        write_log_csv(log, log_path)
    return TrainResult(best_epoch, best_ppl, log, best_params)


def write_log_csv(log: list[EpochLog], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("epoch,train_loss,dev_perplexity,wall_seconds\n")
        for row in log:
            f.write(
                f"{row.epoch},{row.train_loss!r},{row.dev_perplexity!r},{row.wall_seconds!r}\n"
            )
