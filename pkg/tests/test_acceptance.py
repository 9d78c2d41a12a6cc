"""End-to-end acceptance suite.

One test per acceptance criterion, numbered so `pytest -v` prints a single
pass/fail line for each. Each test also prints a short detail line (visible
with -s or on failure). Criterion 9 is data-dependent and runs only when
SQGEN_NQ_DIR points at a full prepared-corpus directory; it is skipped (with
an explicit message) otherwise.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from helpers import METRIC_SUITE, StubModel, copy_task, toy_model
from sqgen import cli, numerics as nm, training
from sqgen.corpus import (
    DatasetSplit,
    RawRecord,
    Rejected,
    bracket_answers,
    clean_article,
    dataset_stats,
    prepare_example,
    prepare_news,
    read_prepared,
    strip_markers,
)
from sqgen.decoding import beam_search, greedy, sample_step
from sqgen.genmetrics import bleu, rouge_l, tokenize
from sqgen.model import BertPgn, ModelConfig, output_distribution
from sqgen.qaeval import (
    QaOutput,
    answerability,
    best_span,
    no_answer_prob,
    pearson,
)
from sqgen.textproc import BOS_ID, EOS_ID, decode, encode, train_vocab

GRAD_TOL = 1e-4
FD_H = 1e-5


def small_config(**overrides) -> ModelConfig:
    base = dict(
        vocab_size=20, d_model=16, n_heads=2, encoder_layers=1,
        decoder_lm_layers=1, cross_layers=1, ffn_dim=32,
        max_context=16, max_question=8,
    )
    base.update(overrides)
    return ModelConfig(**base)


def random_example(rng, vocab_size: int, ctx_len=(4, 10), q_len=(3, 6)):
    """(context_ids, type_ids, question_ids) drawn over non-special tokens."""
    n = int(rng.integers(*ctx_len))
    context = rng.integers(4, vocab_size, size=n).tolist()
    types = rng.integers(0, 2, size=n).tolist()
    q = rng.integers(4, vocab_size, size=int(rng.integers(*q_len))).tolist()
    return context, types, q


class TestCriterion1:
    def test_criterion_01_gradients_match_finite_differences(self):
        t0 = time.monotonic()
        config = ModelConfig(
            vocab_size=30, d_model=64, n_heads=4, encoder_layers=2,
            decoder_lm_layers=2, cross_layers=2, ffn_dim=128,
            max_context=16, max_question=12,
        )
        model = BertPgn(config, seed=0)
        rng = np.random.default_rng(0)
        worst = 0.0

        for batch_idx in range(3):
            batch = []
            for _ in range(2):
                ctx, types, q = random_example(rng, config.vocab_size)
                batch.append(
                    type(
                        "Ex", (),
                        {"context_ids": ctx, "type_ids": types, "question_ids": q},
                    )()
                )

            def loss_value() -> float:
                with nm.no_grad():
                    losses = [training.nll_loss(model, ex) for ex in batch]
                total = losses[0]
                for extra in losses[1:]:
                    total = total + extra
                return float(total.item()) / len(batch)

            losses = [training.nll_loss(model, ex) for ex in batch]
            total = losses[0]
            for extra in losses[1:]:
                total = total + extra
            loss = nm.mul(total, 1.0 / len(batch))
            grads = nm.grad_map(loss, model.params)

            # Whole-gradient directional derivative.
            direction = {
                name: rng.standard_normal(p.data.shape)
                for name, p in model.params.items()
            }
            norm = math.sqrt(
                sum(float((v * v).sum()) for v in direction.values())
            )
            direction = {k: v / norm for k, v in direction.items()}
            fd_dir = oracles.fd_directional(loss_value, model.params, direction, h=FD_H)
            an_dir = sum(
                float((grads[name] * vec).sum()) for name, vec in direction.items()
            )
            err = oracles.rel_err(fd_dir, an_dir)
            worst = max(worst, err)
            assert err < GRAD_TOL, f"batch {batch_idx}: directional rel err {err:.3e}"

            # Sampled entries of every parameter tensor.
            for name, param in model.params.items():
                size = param.data.size
                for flat in rng.choice(size, size=min(2, size), replace=False):
                    fd = oracles.fd_entry(loss_value, param.data, int(flat), h=FD_H)
                    an = float(grads[name].reshape(-1)[int(flat)])
                    err = oracles.rel_err(fd, an)
                    worst = max(worst, err)
                    assert err < GRAD_TOL, f"{name}[{flat}]: rel err {err:.3e}"

        elapsed = time.monotonic() - t0
        assert elapsed < 120.0, f"gradient check took {elapsed:.1f}s"
        print(f"criterion 1: worst rel err {worst:.2e} over 3 batches in {elapsed:.1f}s")


class TestCriterion2:
    def test_criterion_02_mixture_soundness(self):
        rng = np.random.default_rng(1)
        checked = 0
        for model_idx in range(20):
            config = small_config(
                d_model=16 if model_idx % 2 == 0 else 32,
                n_heads=2 if model_idx % 2 == 0 else 4,
            )
            model = BertPgn(config, seed=model_idx)
            for _ in range(50):
                ctx, types, _ = random_example(rng, config.vocab_size)
                enc = model.encode_context(ctx, types)
                prefix = [BOS_ID] + rng.integers(
                    4, config.vocab_size, size=int(rng.integers(0, 4))
                ).tolist()
                step = model.decode_step(prefix, enc)

                assert abs(float(step.final_dist.sum()) - 1.0) <= 1e-6
                assert 0.0 < step.p_gen < 1.0

                copy_only = output_distribution(
                    dataclasses.replace(step, p_gen=0.0), enc.context_ids
                )
                assert set(np.nonzero(copy_only)[0].tolist()) == set(ctx)

                vocab_only = output_distribution(
                    dataclasses.replace(step, p_gen=1.0), enc.context_ids
                )
                assert np.array_equal(vocab_only, step.vocab_dist)
                checked += 1
        assert checked == 1000
        print(f"criterion 2: {checked} (model, input) pairs sound")


class TestCriterion3:
    def test_criterion_03_decoder_causality(self):
        rng = np.random.default_rng(2)
        models = [
            BertPgn(small_config(), seed=0),
            BertPgn(small_config(d_model=32, n_heads=4), seed=1),
        ]
        worst = 0.0
        for i in range(100):
            model = models[i % 2]
            ctx, types, _ = random_example(rng, model.config.vocab_size)
            enc = model.encode_context(ctx, types)
            p_len = int(rng.integers(1, 6))
            ext_len = int(rng.integers(1, 4))
            prefix = [BOS_ID] + rng.integers(4, 20, size=p_len - 1).tolist()
            extended = prefix + rng.integers(4, 20, size=ext_len).tolist()
            with nm.no_grad():
                base = model.sequence_distributions(prefix, enc).data
                full = model.sequence_distributions(extended, enc).data
            diff = float(np.max(np.abs(full[: len(prefix)] - base)))
            worst = max(worst, diff)
            assert diff <= 1e-9, f"prefix {i}: future tokens moved outputs by {diff:.2e}"
        print(f"criterion 3: 100 prefixes stable, worst drift {worst:.2e}")


class TestCriterion4:
    def test_criterion_04_toy_overfit(self):
        t0 = time.monotonic()
        examples = copy_task(32)
        config = ModelConfig(
            vocab_size=30, d_model=64, n_heads=4, encoder_layers=2,
            decoder_lm_layers=2, cross_layers=2, ffn_dim=128,
            max_context=16, max_question=8,
        )
        model = BertPgn(config, seed=0)
        split = DatasetSplit(train=examples, dev=examples)
        cfg = training.TrainConfig(lr=1e-3, batch_size=10, epochs=50, seed=0)

        def exact_match_rate() -> float:
            hits = 0
            for ex in examples:
                enc = model.encode_context(ex.context_ids, ex.type_ids)
                ids = greedy(model, enc, max_len=config.max_question).ids[1:]
                if ids and ids[-1] == EOS_ID:
                    ids = ids[:-1]
                hits += ids == ex.question_ids
            return hits / len(examples)

        epochs_used = 0
        ppl = math.inf
        exact = 0.0
        while epochs_used < 300:
            training.train(model, split, cfg)
            epochs_used += cfg.epochs
            ppl = training.perplexity(model, examples)
            exact = exact_match_rate()
            if ppl < 1.2 and exact >= 0.9:
                break

        elapsed = time.monotonic() - t0
        assert ppl < 1.2, f"perplexity {ppl:.4f} after {epochs_used} epochs"
        assert exact >= 0.9, f"exact match {exact:.2%} after {epochs_used} epochs"
        assert elapsed < 300.0, f"overfit took {elapsed:.1f}s"
        print(
            f"criterion 4: perplexity {ppl:.4f}, exact match {exact:.2%} "
            f"after {epochs_used} epochs in {elapsed:.1f}s"
        )


class TestCriterion5:
    def test_criterion_05_beam_one_equals_greedy(self):
        rng = np.random.default_rng(3)
        for case in range(100):
            if case % 2 == 0:
                model = StubModel(vocab_size=int(rng.integers(5, 13)), seed=case)
                enc = None
            else:
                model = toy_model(seed=case)
                ctx, types, _ = random_example(rng, model.config.vocab_size)
                enc = model.encode_context(ctx, types)
            g = greedy(model, enc, max_len=6)
            b = beam_search(model, enc, beam=1, max_len=6)[0]
            assert b.ids == g.ids, f"case {case}"
            assert abs(b.logprob - g.logprob) <= 1e-12
        print("criterion 5a: beam=1 matched greedy on 100 models")

    def test_criterion_05_beam_v_squared_is_exhaustive(self):
        for seed in range(10):
            model = StubModel(vocab_size=3, seed=seed)
            want_ids, want_logprob = oracles.best_sequence(model, None, steps=2)
            got = beam_search(model, None, beam=9, max_len=2, length_normalize=False)[0]
            assert got.ids == want_ids, f"seed {seed}"
            assert got.logprob == pytest.approx(want_logprob, abs=1e-12)
        print("criterion 5b: beam=V^2 matched exhaustive argmax on 10 seeds")

    def test_criterion_05_nucleus_matches_exact_distribution(self):
        dist = np.random.default_rng(123).dirichlet(np.ones(12))
        rng = np.random.default_rng(42)
        draws = 100_000
        counts = np.zeros(dist.size)
        for _ in range(draws):
            counts[sample_step(dist, top_p=1.0, temperature=1.0, rng=rng)] += 1
        tv = oracles.total_variation(counts / draws, dist)
        assert tv < 0.01, f"total variation {tv:.4f}"
        print(f"criterion 5c: nucleus TV {tv:.4f} over {draws} draws")


class TestCriterion6:
    def test_criterion_06_metrics_match_oracle(self):
        cands = [tokenize(c) for c, _ in METRIC_SUITE]
        refs = [[tokenize(r)] for _, r in METRIC_SUITE]

        for max_n in (1, 2, 3, 4):
            got = bleu(cands, refs, max_n=max_n)
            want = oracles.bleu(cands, refs, max_n=max_n)
            assert abs(got - want) <= 1e-6, f"corpus BLEU-{max_n}"
        for cand, ref_group in zip(cands, refs):
            for max_n in (1, 4):
                got = bleu([cand], [ref_group], max_n=max_n)
                want = oracles.bleu([cand], [ref_group], max_n=max_n)
                assert abs(got - want) <= 1e-6
            got = rouge_l(cand, ref_group)
            want = oracles.rouge_l(cand, ref_group)
            assert abs(got - want) <= 1e-6

        identity = tokenize("the cat sat on the mat")
        assert bleu([identity], [[identity]]) == pytest.approx(1.0, abs=1e-12)
        assert rouge_l(identity, [identity]) == pytest.approx(1.0, abs=1e-12)
        disjoint_c = tokenize("completely different words here")
        disjoint_r = tokenize("no overlap at all present")
        assert bleu([disjoint_c], [[disjoint_r]]) == 0.0
        assert rouge_l(disjoint_c, [disjoint_r]) == 0.0
        print(f"criterion 6: BLEU/ROUGE-L matched oracle on {len(METRIC_SUITE)} pairs")


class TestCriterion7:
    def test_criterion_07_qa_metric_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(2, 31))
            p_start = rng.dirichlet(np.ones(n + 1))
            p_end = rng.dirichlet(np.ones(n + 1))
            got = best_span(p_start, p_end)
            want = oracles.best_span(p_start, p_end)
            assert (got.start, got.end) == want[:2]
            assert got.prob == pytest.approx(want[2], abs=1e-15)

        for p in rng.uniform(1e-9, 1.0, size=100):
            assert answerability(float(p), float(p)) == 0.0

        for n in range(2, 31):
            u = np.full(n + 1, 1.0 / (n + 1))
            out = QaOutput(p_start=u, p_end=u, type_probs=np.ones(4) / 4)
            assert no_answer_prob(out) == pytest.approx(
                1.0 / (n + 1) ** 2, rel=1e-12
            )

        x = rng.normal(size=10)
        assert pearson(x, x) == pytest.approx(1.0, abs=1e-12)
        assert pearson(x, -x) == pytest.approx(-1.0, abs=1e-12)
        got = pearson([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])
        assert got == pytest.approx(0.9819805060619659, abs=1e-9)
        print("criterion 7: best_span x1000, score identities, pearson cases all hold")


BOUNDARY_VOCAB_CORPUS = ["a b"]

ROUND_TRIP_RECORDS = [
    RawRecord(
        id="t1", title="capital cities",
        question="what is the capital of france",
        context="paris is the capital of france",
        short_spans=[(0, 5)], starts_with_paragraph_tag=True,
    ),
    RawRecord(
        id="t2", title="rivers", question="which river runs through cairo",
        context="the nile runs through cairo",
        short_spans=[(4, 8)], starts_with_paragraph_tag=True,
    ),
    RawRecord(
        id="t3", title="two answers", question="who met whom",
        context="alice met bob at noon",
        short_spans=[(0, 5), (10, 13)], starts_with_paragraph_tag=True,
    ),
    RawRecord(
        id="t4", title="whole passage", question="what happened",
        context="the storm closed roads",
        short_spans=[], starts_with_paragraph_tag=True,
    ),
    RawRecord(
        id="t5", title="tail answer", question="when did it end",
        context="the race ended at dusk",
        short_spans=[(18, 22)], starts_with_paragraph_tag=True,
    ),
]

CLEANING_CASES = [
    (
        "LONDON (CNN) -- The storm closed roads. @highlight roads closed",
        "The storm closed roads.",
    ),
    ("(CNN)Quick update on the vote.", "Quick update on the vote."),
    (
        "No dateline here at all. @highlight something @highlight more",
        "No dateline here at all.",
    ),
    ("Plain article with nothing to strip.", "Plain article with nothing to strip."),
    ("WASHINGTON (CNN) -- Final tally released.", "Final tally released."),
]


class TestCriterion8:
    def test_criterion_08_preprocessing_fidelity(self, tiny_vocab):
        # Bracket insertion round-trips to the marker-free source text.
        for record in ROUND_TRIP_RECORDS:
            bracketed = bracket_answers(record)
            assert strip_markers(bracketed) == record.title + " " + record.context
        # Type tags isolate exactly the answer region.
        prepared = prepare_example(ROUND_TRIP_RECORDS[0], tiny_vocab)
        tagged = [c for c, t in zip(prepared.context_ids, prepared.type_ids) if t == 1]
        assert decode(tagged, tiny_vocab) == "paris"

        # Dateline and highlight-block stripping.
        for raw, cleaned in CLEANING_CASES:
            assert clean_article(raw) == cleaned

        # Exact length boundaries: 500-token contexts, 50-token questions,
        # 490-token news articles.
        vocab = train_vocab(BOUNDARY_VOCAB_CORPUS, target_size=8)
        assert len(encode("a", vocab)) == 1

        def context_record(n_tokens: int) -> RawRecord:
            return RawRecord(
                id="ctx", title="", question="b",
                context="a " * (n_tokens - 1) + "a",
                short_spans=[(0, 1)], starts_with_paragraph_tag=True,
            )

        kept = prepare_example(context_record(500), vocab)
        assert len(kept.context_ids) == 500
        rejected = prepare_example(context_record(501), vocab)
        assert isinstance(rejected, Rejected) and rejected.reason == "context_too_long"

        def question_record(n_tokens: int) -> RawRecord:
            return RawRecord(
                id="q", title="", question="b " * (n_tokens - 1) + "b",
                context="a a", short_spans=[(0, 1)],
                starts_with_paragraph_tag=True,
            )

        kept = prepare_example(question_record(50), vocab)
        assert len(kept.question_ids) == 50
        rejected = prepare_example(question_record(51), vocab)
        assert isinstance(rejected, Rejected) and rejected.reason == "question_too_long"

        kept = prepare_news("a " * 489 + "a", vocab, article_id="n")
        assert len(kept.context_ids) == 490
        assert kept.type_ids == [1] * 490 and kept.answer_kind == "long"
        rejected = prepare_news("a " * 490 + "a", vocab, article_id="n")
        assert isinstance(rejected, Rejected) and rejected.reason == "too_long"
        print("criterion 8: round-trip, cleaning, and 490/500/50 boundaries exact")


class TestCriterion9:
    @pytest.mark.skipif(
        not os.environ.get("SQGEN_NQ_DIR"),
        reason="full corpus not supplied; set SQGEN_NQ_DIR to run the count check",
    )
    def test_criterion_09_full_corpus_split_counts(self, tmp_path):
        root = Path(os.environ["SQGEN_NQ_DIR"])
        vocab_path = root / "vocab.txt"
        if not vocab_path.exists():
            assert cli.main(
                ["build-vocab", "--kind", "nq", "--input", str(root / "train.jsonl"),
                 "--output", str(tmp_path / "vocab.txt")]
            ) == cli.EXIT_OK
            vocab_path = tmp_path / "vocab.txt"

        expected = {
            "train.jsonl": 99725,
            "dev.jsonl": 11140,
            "eval_short.jsonl": 3364,
            "eval_long.jsonl": 1495,
        }
        prepared_splits = {}
        for name, want in expected.items():
            out = str(tmp_path / f"prepared_{name}")
            assert cli.main(
                ["prepare", "--kind", "nq", "--input", str(root / name),
                 "--output", out, "--vocab", str(vocab_path)]
            ) == cli.EXIT_OK
            prepared_splits[name] = read_prepared(out)
            assert len(prepared_splits[name]) == want, name

        stats = dataset_stats(
            prepared_splits["train.jsonl"] + prepared_splits["dev.jsonl"]
        )
        assert abs(stats.questions_per_context_mean - 1.1) <= 0.05
        print(
            "criterion 9: split counts 99725/11140/3364/1495 with "
            f"{stats.questions_per_context_mean:.3f} questions per context"
        )


PIPELINE_CORPUS = [
    "what is the capital of france",
    "paris is the capital of france",
    "which river runs through cairo",
    "the nile runs through cairo",
    "capital cities rivers",
    "the storm closed roads across the coast",
]

PIPELINE_RECORDS = [
    {
        "id": "r1", "title": "capital cities",
        "question": "what is the capital of france",
        "context": "paris is the capital of france",
        "short_spans": [[0, 5]], "p_tag": True,
    },
    {
        "id": "r2", "title": "rivers",
        "question": "which river runs through cairo",
        "context": "the nile runs through cairo",
        "short_spans": [[4, 8]], "p_tag": True,
    },
]

PIPELINE_NEWS = [
    {
        "id": "r1",
        "article": "(CNN) -- paris is the capital of france",
        "highlights": "paris",
    },
    {
        "id": "r2",
        "article": "(CNN) -- the nile runs through cairo",
        "highlights": "the nile",
    },
]


def run_pipeline(root: Path) -> dict[str, Path]:
    """Vocab -> prepare -> train -> generate -> all three eval reports."""
    root.mkdir(parents=True, exist_ok=True)
    paths = {
        "vocab": root / "vocab.txt",
        "prepared": root / "prepared.jsonl",
        "gen_beam": root / "gen_beam.jsonl",
        "gen_nucleus": root / "gen_nucleus.jsonl",
        "eval_gen": root / "eval_gen.json",
        "per_example": root / "per_example.csv",
        "corr": root / "corr.json",
        "unanimity": root / "unanimity.json",
    }
    corpus_txt = root / "corpus.txt"
    corpus_txt.write_text("\n".join(PIPELINE_CORPUS) + "\n", encoding="utf-8")
    raw = root / "raw.jsonl"
    with open(raw, "w", encoding="utf-8") as f:
        for row in PIPELINE_RECORDS:
            f.write(json.dumps(row) + "\n")
    news = root / "news.jsonl"
    with open(news, "w", encoding="utf-8") as f:
        for row in PIPELINE_NEWS:
            f.write(json.dumps(row) + "\n")

    assert cli.main(
        ["build-vocab", "--input", str(corpus_txt), "--output",
         str(paths["vocab"]), "--size", "110"]
    ) == cli.EXIT_OK
    assert cli.main(
        ["prepare", "--kind", "nq", "--input", str(raw), "--output",
         str(paths["prepared"]), "--vocab", str(paths["vocab"]),
         "--max-context", "64", "--max-question", "16"]
    ) == cli.EXIT_OK
    out_dir = root / "run"
    assert cli.main(
        ["train", "--data", str(paths["prepared"]), "--dev", str(paths["prepared"]),
         "--vocab", str(paths["vocab"]), "--out-dir", str(out_dir),
         "--epochs", "2", "--batch-size", "2", "--seed", "0",
         "--d-model", "16", "--n-heads", "2", "--encoder-layers", "1",
         "--decoder-lm-layers", "1", "--cross-layers", "1", "--ffn-dim", "32",
         "--max-context", "64", "--max-question", "16"]
    ) == cli.EXIT_OK
    paths["best"] = out_dir / "best.ckpt"
    paths["epoch1"] = out_dir / "epoch_001.ckpt"
    paths["epoch2"] = out_dir / "epoch_002.ckpt"

    common = ["--checkpoint", str(paths["best"]), "--data", str(paths["prepared"]),
              "--vocab", str(paths["vocab"]), "--max-question", "8"]
    assert cli.main(
        ["generate", *common, "--output", str(paths["gen_beam"]),
         "--mode", "beam", "--beam", "2"]
    ) == cli.EXIT_OK
    assert cli.main(
        ["generate", *common, "--output", str(paths["gen_nucleus"]),
         "--mode", "nucleus", "--top-p", "0.9", "--temperature", "1.0",
         "--seed", "3"]
    ) == cli.EXIT_OK

    assert cli.main(
        ["eval", "gen", "--candidates", str(paths["gen_beam"]), "--references",
         str(paths["prepared"]), "--vocab", str(paths["vocab"]),
         "--output", str(paths["eval_gen"]), "--per-example",
         str(paths["per_example"])]
    ) == cli.EXIT_OK

    qa_prefix = root / "qa"
    assert cli.main(
        ["eval", "qa", "--questions", str(paths["gen_beam"]), "--contexts",
         str(news), "--vocab", str(paths["vocab"]), "--output-prefix",
         str(qa_prefix), "--model-tag", "toy"]
    ) == cli.EXIT_OK
    paths["qa_scatter"] = Path(str(qa_prefix) + "_scatter.csv")
    paths["qa_means"] = Path(str(qa_prefix) + "_means.csv")
    paths["qa_svg"] = Path(str(qa_prefix) + "_scatter.svg")

    annotations = root / "annotations.jsonl"
    flag_names = (
        "context", "irrelevant", "contradiction", "peripheral",
        "span", "entire", "none",
    )
    with open(annotations, "w", encoding="utf-8") as f:
        for article, vote in (("r1", True), ("r2", False)):
            for k in range(3):
                flags = dict.fromkeys(flag_names, False)
                flags["span"] = vote
                f.write(
                    json.dumps(
                        {"article_id": article, "annotator_id": f"ann{k}",
                         "flags": flags}
                    )
                    + "\n"
                )
    assert cli.main(
        ["eval", "correlate", "--scores", str(paths["qa_scatter"]),
         "--annotations", str(annotations), "--output", str(paths["corr"]),
         "--unanimity-output", str(paths["unanimity"])]
    ) == cli.EXIT_OK
    return paths


class TestCriterion10:
    def test_criterion_10_determinism(self, tmp_path):
        first = run_pipeline(tmp_path / "one")
        second = run_pipeline(tmp_path / "two")
        compared = []
        for key in (
            "vocab", "prepared", "best", "epoch1", "epoch2", "gen_beam",
            "gen_nucleus", "eval_gen", "per_example", "qa_scatter", "qa_means",
            "qa_svg", "corr", "unanimity",
        ):
            a = first[key].read_bytes()
            b = second[key].read_bytes()
            assert a == b, f"{key} differs between identically seeded runs"
            compared.append(key)
        print(f"criterion 10: {len(compared)} artifacts byte-identical across runs")
