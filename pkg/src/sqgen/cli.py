"""Command-line front end for the whole pipeline.

    sqgen build-vocab   learn a subword vocabulary from raw data
    sqgen prepare       raw records -> model-ready examples (nq or news)
    sqgen train         teacher-forced training with per-epoch checkpoints
    sqgen generate      beam / nucleus / greedy question generation
    sqgen eval          gen (overlap metrics), qa (scorer-based), correlate

Every artifact-producing command drops a `<output>.manifest.json` recording
the command line, inputs, outputs, seed, and code version. Exit codes:
0 success, 2 input error, 3 numerical failure. The SQGEN_THREADS environment
variable caps worker threads for data preparation.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone

from . import corpus, decoding, genmetrics, qaeval, textproc, training
from .model import BertPgn, ModelConfig
from .qaeval import AnnotationRecord, JointQaScorer, LexicalOverlapScorer

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def max_threads() -> int:
    """Worker-thread cap from SQGEN_THREADS (default 1 = sequential)."""
    try:
        return max(1, int(os.environ.get("SQGEN_THREADS", "1")))
    except ValueError:
        return 1


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def write_manifest(
    output_path: str,
    command: str,
    argv: list[str],
    inputs: list[str],
    outputs: list[str],
    seed: int | None,
    settings: dict | None = None,
    wall_seconds: float | None = None,
) -> str:
    manifest = {
        "command": command,
        "argv": argv,
        "inputs": sorted(inputs),
        "outputs": sorted(outputs),
        "seed": seed,
        "settings": settings or {},
        "git": _git_describe(),
        "started_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_seconds": wall_seconds,
    }
    path = output_path + ".manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


# -- shared plumbing -----------------------------------------------------------


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data


def _setting(args: argparse.Namespace, name: str, default):
    """Flag value if given, else config-file value, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return args._file_config.get(name, default)


def _read_jsonl(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


# -- subcommands -----------------------------------------------------------------


def cmd_build_vocab(args: argparse.Namespace) -> int:
    size = _setting(args, "size", textproc.DEFAULT_VOCAB_SIZE)
    lines: list[str] = []
    if args.kind == "nq":
        for rec in corpus.read_raw_records(args.input):
            lines.extend([rec.title, rec.context, rec.question])
    elif args.kind == "news":
        for _, article, highlights in corpus.read_news_records(args.input):
            lines.append(corpus.clean_article(article))
            lines.append(highlights)
    else:
        with open(args.input, encoding="utf-8") as f:
            lines = f.read().splitlines()
    vocab = textproc.train_vocab(lines, target_size=size)
    textproc.save_vocab(vocab, args.output)
    write_manifest(
        args.output, "build-vocab", sys.argv[1:], [args.input], [args.output],
        seed=None, settings={"size": size, "kind": args.kind},
    )
    print(f"vocab of {len(vocab)} tokens -> {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_prepare(args: argparse.Namespace) -> int:
    vocab = textproc.load_vocab(args.vocab)
    max_context = _setting(args, "max_context", corpus.MAX_CONTEXT_TOKENS)
    max_question = _setting(args, "max_question", corpus.MAX_QUESTION_TOKENS)

    if args.kind == "nq":
        records = list(corpus.read_raw_records(args.input))
        work = lambda rec: corpus.prepare_example(
            rec, vocab, max_context=max_context, max_question=max_question
        )
    else:
        news = list(corpus.read_news_records(args.input))
        records = news
        work = lambda item: corpus.prepare_news(
            item[1], vocab, article_id=item[0], max_tokens=min(max_context, corpus.MAX_NEWS_TOKENS)
        )

    threads = max_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, records))
    else:
        results = [work(r) for r in records]

    kept = [r for r in results if isinstance(r, corpus.PreparedExample)]
    rejected: dict[str, int] = {}
    for r in results:
        if isinstance(r, corpus.Rejected):
            rejected[r.reason] = rejected.get(r.reason, 0) + 1

    corpus.write_prepared(kept, args.output)
    write_manifest(
        args.output, "prepare", sys.argv[1:], [args.input, args.vocab], [args.output],
        seed=None,
        settings={
            "kind": args.kind,
            "max_context": max_context,
            "max_question": max_question,
            "kept": len(kept),
            "rejected": rejected,
        },
    )
    print(
        f"kept {len(kept)} / {len(results)}; rejections: {json.dumps(rejected, sort_keys=True)}",
        file=sys.stderr,
    )
    return EXIT_OK


def _model_config_from_args(args: argparse.Namespace, vocab_size: int) -> ModelConfig:
    return ModelConfig(
        vocab_size=vocab_size,
        d_model=_setting(args, "d_model", 64),
        n_heads=_setting(args, "n_heads", 4),
        encoder_layers=_setting(args, "encoder_layers", 2),
        decoder_lm_layers=_setting(args, "decoder_lm_layers", 2),
        cross_layers=_setting(args, "cross_layers", 2),
        ffn_dim=_setting(args, "ffn_dim", 128),
        max_context=_setting(args, "max_context", corpus.MAX_CONTEXT_TOKENS),
        max_question=_setting(args, "max_question", corpus.MAX_QUESTION_TOKENS),
        use_pointer=not args.no_pointer,
        use_decoder_lm=not args.no_decoder_lm,
        use_type_ids=not args.no_type_ids,
    )


def cmd_train(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    vocab = textproc.load_vocab(args.vocab)
    examples = corpus.read_prepared(args.data)
    if not examples:
        raise ValueError(f"{args.data}: no examples")
    seed = _setting(args, "seed", 0)

    if args.dev:
        split = corpus.DatasetSplit(train=examples, dev=corpus.read_prepared(args.dev))
    else:
        ratio = _setting(args, "split_ratio", 0.9)
        split = corpus.split_dataset(examples, ratio=ratio, seed=seed)

    config = _model_config_from_args(args, vocab_size=len(vocab))
    model = BertPgn(config, seed=seed)
    cfg = training.TrainConfig(
        lr=_setting(args, "lr", 5e-5),
        batch_size=_setting(args, "batch_size", 10),
        epochs=_setting(args, "epochs", 20),
        seed=seed,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    log_path = os.path.join(args.out_dir, "train_log.csv")
    result = training.train(
        model, split, cfg, checkpoint_dir=args.out_dir, log_path=log_path
    )
    write_manifest(
        os.path.join(args.out_dir, "train"),
        "train",
        sys.argv[1:],
        [args.data, args.vocab] + ([args.dev] if args.dev else []),
        [os.path.join(args.out_dir, "best.ckpt"), log_path],
        seed=seed,
        settings={"model": asdict(config), "train": asdict(cfg)},
        wall_seconds=time.monotonic() - t0,
    )
    print(
        f"best epoch {result.best_epoch} dev_perplexity {result.best_dev_perplexity:.4f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    vocab = textproc.load_vocab(args.vocab)
    model = BertPgn.from_checkpoint(args.checkpoint)
    if model.config.vocab_size != len(vocab):
        raise ValueError(
            f"vocab of {len(vocab)} does not match checkpoint "
            f"vocab_size={model.config.vocab_size}"
        )
    examples = corpus.read_prepared(args.data)
    max_len = _setting(args, "max_question", model.config.max_question)
    beam = _setting(args, "beam", decoding.DEFAULT_BEAM)
    top_p = _setting(args, "top_p", decoding.DEFAULT_TOP_P)
    temperature = _setting(args, "temperature", decoding.DEFAULT_TEMPERATURE)
    seed = _setting(args, "seed", 0)

    with open(args.output, "w", encoding="utf-8") as out:
        for ex in examples:
            enc = model.encode_context(ex.context_ids, ex.type_ids)
            if args.mode == "beam":
                hyp = decoding.beam_search(
                    model, enc, beam=beam, max_len=max_len,
                    length_normalize=not args.no_length_normalize,
                )[0]
            elif args.mode == "nucleus":
                hyp = decoding.nucleus_sample(
                    model, enc, top_p=top_p, temperature=temperature,
                    seed=seed, max_len=max_len,
                )
            else:
                hyp = decoding.greedy(model, enc, max_len=max_len)
            out.write(
                json.dumps(
                    {
                        "id": ex.id,
                        "question_text": textproc.decode(hyp.ids, vocab),
                        "logprob": hyp.logprob,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    write_manifest(
        args.output, "generate", sys.argv[1:],
        [args.checkpoint, args.data, args.vocab], [args.output],
        seed=seed,
        settings={
            "mode": args.mode, "beam": beam, "top_p": top_p,
            "temperature": temperature, "max_question": max_len,
        },
    )
    return EXIT_OK


def _eval_gen(args: argparse.Namespace) -> int:
    vocab = textproc.load_vocab(args.vocab)
    cands = _read_jsonl(args.candidates)
    prepared = corpus.read_prepared(args.references)
    refs_by_id: dict[str, list[list[str]]] = {}
    for ex in prepared:
        text = textproc.decode(ex.question_ids, vocab)
        if text:
            refs_by_id.setdefault(ex.id, []).append(genmetrics.tokenize(text))

    candidates: list[list[str]] = []
    references: list[list[list[str]]] = []
    ids: list[str] = []
    for row in cands:
        rid = str(row["id"])
        if rid not in refs_by_id:
            raise ValueError(f"candidate {rid} has no reference question")
        ids.append(rid)
        candidates.append(genmetrics.tokenize(row["question_text"]))
        references.append(refs_by_id[rid])

    report = genmetrics.corpus_report(candidates, references)
    payload = {
        "bleu1": report.bleu1 * 100.0,
        "bleu4": report.bleu4 * 100.0,
        "rouge_l": report.rouge_l * 100.0,
        "meteor_lite": report.meteor_lite * 100.0,
        "n": report.n_examples,
    }
    with open(args.output, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    if args.per_example:
        with open(args.per_example, "w", encoding="utf-8") as f:
            f.write("id,bleu1,bleu4,rouge_l,meteor_lite\n")
            for rid, cand, refs in zip(ids, candidates, references):
                b1 = genmetrics.bleu([cand], [refs], max_n=1) * 100.0
                b4 = genmetrics.bleu([cand], [refs], max_n=4) * 100.0
                rl = genmetrics.rouge_l(cand, refs) * 100.0
                ml = max(genmetrics.meteor_lite(cand, ref) for ref in refs) * 100.0
                f.write(f"{rid},{b1!r},{b4!r},{rl!r},{ml!r}\n")
    write_manifest(
        args.output, "eval gen", sys.argv[1:],
        [args.candidates, args.references, args.vocab],
        [args.output] + ([args.per_example] if args.per_example else []),
        seed=None, settings=payload,
    )
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _eval_qa(args: argparse.Namespace) -> int:
    vocab = textproc.load_vocab(args.vocab)
    questions = _read_jsonl(args.questions)
    contexts: dict[str, list[int]] = {}
    for cid, article, highlights in corpus.read_news_records(args.contexts):
        source = corpus.clean_article(article) if args.context_source == "article" else highlights
        contexts[cid] = textproc.encode(source, vocab)

    if args.scorer == "joint":
        if not args.scorer_ckpt:
            raise ValueError("--scorer joint needs --scorer-ckpt")
        scorer = JointQaScorer.from_checkpoint(args.scorer_ckpt)
    else:
        scorer = LexicalOverlapScorer()

    tag = args.model_tag
    rows: list[tuple[str, float, float]] = []
    for row in questions:
        rid = str(row["id"])
        if rid not in contexts:
            raise ValueError(f"question {rid} has no context")
        q_ids = textproc.encode(row["question_text"], vocab)
        scores = qaeval.qa_score(scorer, q_ids, contexts[rid])
        rows.append((rid, scores.answerability, scores.granularity))

    scatter_csv = args.output_prefix + "_scatter.csv"
    with open(scatter_csv, "w", encoding="utf-8") as f:
        f.write("id,s_ans,s_gra,model_tag\n")
        for rid, ans, gra in rows:
            f.write(f"{rid},{ans!r},{gra!r},{tag}\n")

    means_csv = args.output_prefix + "_means.csv"
    with open(means_csv, "w", encoding="utf-8") as f:
        f.write("model_tag,mean_s_ans,mean_s_gra,n\n")
        if rows:
            mean_ans = sum(r[1] for r in rows) / len(rows)
            mean_gra = sum(r[2] for r in rows) / len(rows)
            f.write(f"{tag},{mean_ans!r},{mean_gra!r},{len(rows)}\n")

    svg_path = args.output_prefix + "_scatter.svg"
    scatter_svg(
        svg_path,
        [(r[1], r[2]) for r in rows],
        xlabel="answerability",
        ylabel="granularity",
        title=tag,
    )
    write_manifest(
        scatter_csv, "eval qa", sys.argv[1:],
        [args.questions, args.contexts, args.vocab],
        [scatter_csv, means_csv, svg_path],
        seed=None,
        settings={"scorer": args.scorer, "context_source": args.context_source, "n": len(rows)},
    )
    return EXIT_OK


def _eval_correlate(args: argparse.Namespace) -> int:
    scores: dict[str, tuple[float, float]] = {}
    with open(args.scores, encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in f:
            parts = line.strip().split(",")
            if len(parts) < 3:
                continue
            scores[parts[idx["id"]]] = (
                float(parts[idx["s_ans"]]),
                float(parts[idx["s_gra"]]),
            )
    annotations = [
        AnnotationRecord(
            article_id=str(row["article_id"]),
            annotator_id=str(row["annotator_id"]),
            flags={k: bool(v) for k, v in row["flags"].items()},
        )
        for row in _read_jsonl(args.annotations)
    ]
    report = qaeval.correlation_report(scores, annotations)
    with open(args.output, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    if args.unanimity_output:
        ratios = qaeval.unanimity_ratios(annotations)
        payload = {
            flag: {
                "n_unanimous": row.n_unanimous,
                "true_pct": row.true_pct,
                "false_pct": row.false_pct,
            }
            for flag, row in ratios.items()
        }
        with open(args.unanimity_output, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    write_manifest(
        args.output, "eval correlate", sys.argv[1:],
        [args.scores, args.annotations],
        [args.output] + ([args.unanimity_output] if args.unanimity_output else []),
        seed=None,
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    if args.eval_kind == "gen":
        return _eval_gen(args)
    if args.eval_kind == "qa":
        return _eval_qa(args)
    return _eval_correlate(args)


# -- plotting -----------------------------------------------------------------


def scatter_svg(
    path: str,
    points: list[tuple[float, float]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    width: int = 640,
    height: int = 480,
) -> None:
    """Write a self-contained static SVG scatter plot (no plotting library)."""
    margin = 60
    if points:
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        xmin, xmax = min(xs), max(xs)
        ymin, ymax = min(ys), max(ys)
    else:
        xmin = ymin = -1.0
        xmax = ymax = 1.0
    if xmax == xmin:
        xmin, xmax = xmin - 1.0, xmax + 1.0
    if ymax == ymin:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    xpad = 0.05 * (xmax - xmin)
    ypad = 0.05 * (ymax - ymin)
    xmin, xmax = xmin - xpad, xmax + xpad
    ymin, ymax = ymin - ypad, ymax + ypad

    def px(x: float) -> float:
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin)

    def py(y: float) -> float:
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = xmin + frac * (xmax - xmin)
        yv = ymin + frac * (ymax - ymin)
        parts.append(
            f'<text x="{px(xv):.1f}" y="{height - margin + 18}" font-size="11" '
            f'text-anchor="middle">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{py(yv):.1f}" font-size="11" '
            f'text-anchor="end" dominant-baseline="middle">{yv:.3g}</text>'
        )
    # zero axes, when in range
    if xmin < 0.0 < xmax:
        parts.append(
            f'<line x1="{px(0):.1f}" y1="{margin}" x2="{px(0):.1f}" '
            f'y2="{height - margin}" stroke="#cccccc" stroke-dasharray="4"/>'
        )
    if ymin < 0.0 < ymax:
        parts.append(
            f'<line x1="{margin}" y1="{py(0):.1f}" x2="{width - margin}" '
            f'y2="{py(0):.1f}" stroke="#cccccc" stroke-dasharray="4"/>'
        )
    for x, y in points:
        parts.append(
            f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="#4477aa" '
            f'fill-opacity="0.6"/>'
        )
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{height / 2:.0f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {height / 2:.0f})">{ylabel}</text>'
    )
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="24" font-size="14" '
            f'text-anchor="middle">{title}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(parts) + "\n")


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqgen", description=__doc__)
    parser.add_argument("--config", help="JSON file of default settings; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-vocab", help="learn a subword vocabulary")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--kind", choices=("nq", "news", "text"), default="text")
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("prepare", help="raw records -> prepared examples")
    p.add_argument("--kind", choices=("nq", "news"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--max-context", dest="max_context", type=int, default=None)
    p.add_argument("--max-question", dest="max_question", type=int, default=None)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="train the generator")
    p.add_argument("--data", required=True)
    p.add_argument("--dev", default=None)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--split-ratio", dest="split_ratio", type=float, default=None)
    p.add_argument("--d-model", dest="d_model", type=int, default=None)
    p.add_argument("--n-heads", dest="n_heads", type=int, default=None)
    p.add_argument("--encoder-layers", dest="encoder_layers", type=int, default=None)
    p.add_argument("--decoder-lm-layers", dest="decoder_lm_layers", type=int, default=None)
    p.add_argument("--cross-layers", dest="cross_layers", type=int, default=None)
    p.add_argument("--ffn-dim", dest="ffn_dim", type=int, default=None)
    p.add_argument("--max-context", dest="max_context", type=int, default=None)
    p.add_argument("--max-question", dest="max_question", type=int, default=None)
    p.add_argument("--no-pointer", action="store_true")
    p.add_argument("--no-decoder-lm", dest="no_decoder_lm", action="store_true")
    p.add_argument("--no-type-ids", dest="no_type_ids", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="decode questions from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--mode", choices=("beam", "nucleus", "greedy"), default="beam")
    p.add_argument("--beam", type=int, default=None)
    p.add_argument("--top-p", dest="top_p", type=float, default=None)
    p.add_argument("--temperature", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-question", dest="max_question", type=int, default=None)
    p.add_argument(
        "--no-length-normalize", dest="no_length_normalize", action="store_true"
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="score generations")
    esub = p.add_subparsers(dest="eval_kind", required=True)

    g = esub.add_parser("gen", help="overlap metrics against references")
    g.add_argument("--candidates", required=True)
    g.add_argument("--references", required=True)
    g.add_argument("--vocab", required=True)
    g.add_argument("--output", required=True)
    g.add_argument("--per-example", dest="per_example", default=None)
    g.set_defaults(func=cmd_eval)

    q = esub.add_parser("qa", help="answerability/granularity scoring")
    q.add_argument("--questions", required=True)
    q.add_argument("--contexts", required=True)
    q.add_argument("--vocab", required=True)
    q.add_argument("--output-prefix", dest="output_prefix", required=True)
    q.add_argument(
        "--context-source",
        dest="context_source",
        choices=("article", "highlights"),
        default="article",
    )
    q.add_argument("--scorer", choices=("lexical", "joint"), default="lexical")
    q.add_argument("--scorer-ckpt", dest="scorer_ckpt", default=None)
    q.add_argument("--model-tag", dest="model_tag", default="model")
    q.set_defaults(func=cmd_eval)

    c = esub.add_parser("correlate", help="flags vs scores correlation report")
    c.add_argument("--scores", required=True)
    c.add_argument("--annotations", required=True)
    c.add_argument("--output", required=True)
    c.add_argument("--unanimity-output", dest="unanimity_output", default=None)
    c.set_defaults(func=cmd_eval)

    return parser


INPUT_ERRORS = (
    ValueError,
    KeyError,
    OSError,
    json.JSONDecodeError,
)

NUMERIC_ERRORS = (ArithmeticError,)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._file_config = _load_config_file(args.config)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
