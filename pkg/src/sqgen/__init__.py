"""Answer-aware subword question generation with a pointer mixture.

The package covers the full pipeline: subword vocabulary training
(`textproc`), dataset preparation for answer-tagged contexts and news
articles (`corpus`), a transformer encoder/decoder with a copy mechanism
built on a small reverse-mode autodiff core (`numerics`, `model`),
teacher-forced training (`training`), beam/nucleus/greedy decoding
(`decoding`), n-gram overlap metrics (`genmetrics`), and QA-based
answerability/granularity scoring with human-annotation correlation
(`qaeval`). The `sqgen` command line ties the stages together.
"""

from .corpus import (
    DatasetSplit,
    PreparedExample,
    RawRecord,
    prepare_example,
    split_dataset,
)
from .decoding import beam_search, greedy, nucleus_sample
from .model import BertPgn, ModelConfig
from .qaeval import JointQaScorer, LexicalOverlapScorer, qa_score
from .textproc import Vocab, decode, encode, load_vocab, save_vocab, train_vocab
from .training import TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "BertPgn",
    "DatasetSplit",
    "JointQaScorer",
    "LexicalOverlapScorer",
    "ModelConfig",
    "PreparedExample",
    "RawRecord",
    "TrainConfig",
    "Vocab",
    "beam_search",
    "decode",
    "encode",
    "greedy",
    "load_vocab",
    "nucleus_sample",
    "prepare_example",
    "qa_score",
    "save_vocab",
    "split_dataset",
    "train",
    "train_vocab",
    "__version__",
]
