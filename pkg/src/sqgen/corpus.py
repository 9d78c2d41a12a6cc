"""Turning raw QA records and news articles into model-ready examples.

The context side of an example is a token id sequence paired with a 0/1
type id per token marking the answer region. Short answers are marked by
their character spans; a context with no short span is treated as one long
answer and tagged whole. Page titles ride along in front of the context,
untagged.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import textproc
from .textproc import Vocab

SHORT_ANSWER = "short"
LONG_ANSWER = "long"

OPEN_MARK = "[ "
CLOSE_MARK = " ]"

MAX_CONTEXT_TOKENS = 500
MAX_QUESTION_TOKENS = 50
MAX_NEWS_TOKENS = 490

NEWS_SOURCE_MARK = "(CNN)"
HIGHLIGHT_MARK = "@highlight"


class InvalidSpans(ValueError):
    """Spans are out of bounds, inverted, overlapping, or context is empty."""


class InvalidRatio(ValueError):
    """Split ratio must sit strictly between 0 and 1."""


@dataclass
class RawRecord:
    id: str
    title: str
    question: str
    context: str
    short_spans: list[tuple[int, int]] = field(default_factory=list)
    starts_with_paragraph_tag: bool = True


@dataclass
class PreparedExample:
    id: str
    context_ids: list[int]
    type_ids: list[int]
    question_ids: list[int]
    answer_kind: str


@dataclass
class Rejected:
    id: str
    reason: str


@dataclass
class DatasetSplit:
    train: list[PreparedExample]
    dev: list[PreparedExample]
    seed: int = 0


@dataclass
class DatasetStats:
    n_examples: int
    n_unique_contexts: int
    questions_per_context_mean: float
    questions_per_context_max: int


def _validated_spans(record: RawRecord) -> list[tuple[int, int]]:
    if not record.context:
        raise InvalidSpans(f"record {record.id}: empty context")
    spans = sorted((int(s), int(e)) for s, e in record.short_spans)
    prev_end = 0
    for s, e in spans:
        if s < 0 or e > len(record.context) or s >= e:
            raise InvalidSpans(f"record {record.id}: bad span ({s},{e})")
        if s < prev_end:
            raise InvalidSpans(f"record {record.id}: overlapping span ({s},{e})")
        prev_end = e
    return spans


def bracket_answers(record: RawRecord) -> str:
    """Title plus context with the answer region wrapped in space-padded
    brackets; with no short spans the whole context is one bracketed long
    answer."""
    spans = _validated_spans(record)
    ctx = record.context
    if not spans:
        bracketed = OPEN_MARK + ctx + CLOSE_MARK
    else:
        pieces: list[str] = []
        prev = 0
        for s, e in spans:
            pieces.append(ctx[prev:s])
            pieces.append(OPEN_MARK + ctx[s:e] + CLOSE_MARK)
            prev = e
        pieces.append(ctx[prev:])
        bracketed = "".join(pieces)
    return record.title + " " + bracketed


def strip_markers(text: str) -> str:
    """Remove the bracket markers bracket_answers inserted."""
    return text.replace(OPEN_MARK, "").replace(CLOSE_MARK, "")


def _tagged_segments(record: RawRecord, spans: list[tuple[int, int]]) -> list[tuple[str, int]]:
    """(text, tag) pieces in context order; tag 1 inside the answer region.

    Empty pieces are harmless (they tokenize to nothing), so no filtering.
    """
    ctx = record.context
    segments: list[tuple[str, int]] = [(record.title, 0)]
    if not spans:
        segments.append((ctx, 1))
        return segments
    prev = 0
    for s, e in spans:
        segments.append((ctx[prev:s], 0))
        segments.append((ctx[s:e], 1))
        prev = e
    segments.append((ctx[prev:], 0))
    return segments


def prepare_example(
    record: RawRecord,
    vocab: Vocab,
    max_context: int = MAX_CONTEXT_TOKENS,
    max_question: int = MAX_QUESTION_TOKENS,
) -> PreparedExample | Rejected:
    """Bracket, tokenize, and tag one QA record.

    Returns Rejected (with a stable reason string) rather than raising for
    the data-quality filters; malformed spans are an error, not a filter.
    """
    spans = _validated_spans(record)
    if not record.starts_with_paragraph_tag:
        return Rejected(record.id, "no_paragraph_tag")

    context_ids: list[int] = []
    type_ids: list[int] = []
    for text, tag in _tagged_segments(record, spans):
        ids = textproc.encode(text, vocab)
        context_ids.extend(ids)
        type_ids.extend([tag] * len(ids))

    if sum(type_ids) == 0:
        return Rejected(record.id, "empty_answer")
    if len(context_ids) > max_context:
        return Rejected(record.id, "context_too_long")

    question_ids = textproc.encode(record.question, vocab)
    if len(question_ids) > max_question:
        return Rejected(record.id, "question_too_long")

    kind = SHORT_ANSWER if spans else LONG_ANSWER
    return PreparedExample(record.id, context_ids, type_ids, question_ids, kind)


def clean_article(article: str) -> str:
    """Drop the highlights block and the leading dateline from a news article."""
    cut = article.find(HIGHLIGHT_MARK)
    if cut != -1:
        article = article[:cut]
    mark = article.find(NEWS_SOURCE_MARK)
    if mark != -1:
        article = article[mark + len(NEWS_SOURCE_MARK) :]
        article = article.lstrip()
        if article.startswith("--"):
            article = article[2:].lstrip()
    return article.strip()


def prepare_news(
    article: str,
    vocab: Vocab,
    article_id: str = "",
    max_tokens: int = MAX_NEWS_TOKENS,
) -> PreparedExample | Rejected:
    """One long-answer example per article: whole text tagged, no question."""
    cleaned = clean_article(article)
    if not cleaned:
        return Rejected(article_id, "empty")
    context_ids = textproc.encode(cleaned, vocab)
    if not context_ids:
        return Rejected(article_id, "empty")
    if len(context_ids) > max_tokens:
        return Rejected(article_id, "too_long")
    return PreparedExample(
        id=article_id,
        context_ids=context_ids,
        type_ids=[1] * len(context_ids),
        question_ids=[],
        answer_kind=LONG_ANSWER,
    )


def split_dataset(
    examples: list[PreparedExample], ratio: float = 0.9, seed: int = 0
) -> DatasetSplit:
    """Seeded shuffle, then the first ceil(ratio * N) examples become train."""
    if not 0.0 < ratio < 1.0:
        raise InvalidRatio(f"ratio must be in (0,1), got {ratio}")
    shuffled = list(examples)
    random.Random(seed).shuffle(shuffled)
    n_train = math.ceil(ratio * len(shuffled))
    return DatasetSplit(train=shuffled[:n_train], dev=shuffled[n_train:], seed=seed)


def dataset_stats(examples: list[PreparedExample]) -> DatasetStats:
    if not examples:
        return DatasetStats(0, 0, 0.0, 0)
    counts: dict[tuple[int, ...], int] = {}
    for ex in examples:
        key = tuple(ex.context_ids)
        counts[key] = counts.get(key, 0) + 1
    return DatasetStats(
        n_examples=len(examples),
        n_unique_contexts=len(counts),
        questions_per_context_mean=len(examples) / len(counts),
        questions_per_context_max=max(counts.values()),
    )


# -- wire formats ------------------------------------------------------------


def read_raw_records(path: str) -> Iterator[RawRecord]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            yield RawRecord(
                id=str(obj["id"]),
                title=obj.get("title", ""),
                question=obj.get("question", ""),
                context=obj["context"],
                short_spans=[(int(s), int(e)) for s, e in obj.get("short_spans", [])],
                starts_with_paragraph_tag=bool(obj.get("p_tag", True)),
            )


def read_news_records(path: str) -> Iterator[tuple[str, str, str]]:
    """Yield (id, article, highlights) from a news JSONL file."""
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            yield str(obj["id"]), obj["article"], obj.get("highlights", "")


def write_prepared(examples: Iterable[PreparedExample], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(
                json.dumps(
                    {
                        "id": ex.id,
                        "context_ids": ex.context_ids,
                        "type_ids": ex.type_ids,
                        "question_ids": ex.question_ids,
                        "answer_kind": ex.answer_kind,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_prepared(path: str) -> list[PreparedExample]:
    out: list[PreparedExample] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(
                PreparedExample(
                    id=str(obj["id"]),
                    context_ids=[int(i) for i in obj["context_ids"]],
                    type_ids=[int(i) for i in obj["type_ids"]],
                    question_ids=[int(i) for i in obj["question_ids"]],
                    answer_kind=obj["answer_kind"],
                )
            )
    return out
