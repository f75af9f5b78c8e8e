"""Subword segmentation: BPE, BPE-dropout and unigram LM (Viterbi and sampling)."""

from .bpe import MergeTable, bpe_dropout_encode, bpe_encode, bpe_train, read_merges, write_merges
from .corpus import SubwordModel, detokenize_corpus, load_model, save_model, segment_corpus, word_frequencies
from .segmentation import DEFAULT_MARKER, Segmentation, detokenize
from .unigram import (
    DEFAULT_ALPHA,
    UnigramTrainerConfig,
    UnigramVocab,
    corpus_log_likelihood,
    em_step,
    read_vocab,
    unigram_sample,
    unigram_train,
    unigram_viterbi,
    write_vocab,
)

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_MARKER",
    "MergeTable",
    "Segmentation",
    "SubwordModel",
    "UnigramTrainerConfig",
    "UnigramVocab",
    "bpe_dropout_encode",
    "bpe_encode",
    "bpe_train",
    "corpus_log_likelihood",
    "detokenize",
    "detokenize_corpus",
    "em_step",
    "load_model",
    "read_merges",
    "read_vocab",
    "save_model",
    "segment_corpus",
    "unigram_sample",
    "unigram_train",
    "unigram_viterbi",
    "word_frequencies",
    "write_merges",
    "write_vocab",
]
