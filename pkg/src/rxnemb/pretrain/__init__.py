"""Corpus construction and real/fictitious pre-training."""

from .corpus import (
    FICTITIOUS_SUFFIX,
    LabeledReaction,
    make_fictitious_corpus,
    parse_records,
    read_corpus_jsonl,
    read_reactions_jsonl,
    write_corpus_jsonl,
)
from .templates import ALKYL, ARYL, SUBSTITUENTS, TEMPLATES, synth_templates
from .trainer import (
    HISTORY_COLUMNS,
    CorpusSplit,
    EpochRecord,
    Trainer,
    TrainResult,
    auroc,
    evaluate,
    split_corpus,
    train,
    write_history,
)

__all__ = [
    "ALKYL",
    "ARYL",
    "CorpusSplit",
    "EpochRecord",
    "FICTITIOUS_SUFFIX",
    "HISTORY_COLUMNS",
    "LabeledReaction",
    "SUBSTITUENTS",
    "TEMPLATES",
    "TrainResult",
    "Trainer",
    "auroc",
    "evaluate",
    "make_fictitious_corpus",
    "parse_records",
    "read_corpus_jsonl",
    "read_reactions_jsonl",
    "split_corpus",
    "synth_templates",
    "train",
    "write_corpus_jsonl",
    "write_history",
]
