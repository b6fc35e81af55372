"""Mutation-aware protein unit tokenizer."""

from ._puma import (
    IoError,
    NotFoundError,
    ParseError,
    PumaError,
    Segmenter,
    SubstitutionMatrix,
    ValidationError,
    Vocabulary,
    enumerate_variants,
    nw_align,
    positional_score,
    random_vocabulary,
    read_fasta,
    same_sibling_rate,
    self_score,
    similarity,
    spearman,
    train,
    vocab_identity,
    vocab_stats,
    win_rate,
)

__all__ = [
    "IoError",
    "NotFoundError",
    "ParseError",
    "PumaError",
    "Segmenter",
    "SubstitutionMatrix",
    "ValidationError",
    "Vocabulary",
    "enumerate_variants",
    "nw_align",
    "positional_score",
    "random_vocabulary",
    "read_fasta",
    "same_sibling_rate",
    "self_score",
    "similarity",
    "spearman",
    "train",
    "vocab_identity",
    "vocab_stats",
    "win_rate",
]
