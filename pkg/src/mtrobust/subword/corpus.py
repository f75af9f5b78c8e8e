"""Corpus-level segmentation, as offline preprocessing of whole text files."""

from __future__ import annotations

import enum
import re
from collections import Counter
from pathlib import Path
from typing import Iterable, Optional, Union

from ..corpus_io import PathLike, SentenceList
from ..seeding import stream
from .bpe import MergeTable, bpe_dropout_encode, bpe_encode, read_merges, write_merges
from .segmentation import DEFAULT_MARKER, detokenize
from .unigram import DEFAULT_ALPHA, UnigramVocab, read_vocab, unigram_sample, unigram_viterbi, write_vocab

SubwordModel = Union[MergeTable, UnigramVocab]

_SPLIT = re.compile(r"(\s+)")


class Mode(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    SAMPLE = "sample"


def word_frequencies(sentences: Iterable[str]) -> Counter:
    """Whitespace pre-tokenization; no punctuation handling."""
    return Counter(w for s in sentences for w in s.split())


def segment_corpus(
    sentences: Iterable[str],
    model: SubwordModel,
    mode: Mode = Mode.DETERMINISTIC,
    drop_prob_or_alpha: Optional[float] = None,
    seed: int = 0,
    marker: Optional[str] = None,
) -> SentenceList:
    """Segment every word, marking non-final pieces with ``marker``.

    In sample mode each sentence draws one segmentation from its own stream
    ``(seed, sentence_index)``: BPE-dropout for a merge table (parameter is
    the drop probability), unigram sampling for a vocabulary (parameter is
    alpha). Whitespace between words is preserved, so
    :func:`detokenize_corpus` restores the input exactly.
    """
    mode = Mode(mode)
    if marker is None:
        marker = model.marker if isinstance(model, MergeTable) else DEFAULT_MARKER
    if isinstance(model, MergeTable):
        param = 0.0 if drop_prob_or_alpha is None else drop_prob_or_alpha
    elif isinstance(model, UnigramVocab):
        param = DEFAULT_ALPHA if drop_prob_or_alpha is None else drop_prob_or_alpha
    else:
        raise TypeError(f"unsupported subword model {type(model).__name__}")

    out = []
    for index, sentence in enumerate(sentences):
        rng = stream(seed, index) if mode is Mode.SAMPLE else None
        parts = _SPLIT.split(sentence)
        for k, word in enumerate(parts):
            if not word or word.isspace():
                continue
            if isinstance(model, MergeTable):
                seg = bpe_dropout_encode(word, model, param, rng) if rng else bpe_encode(word, model)
            else:
                seg = unigram_sample(word, model, param, rng) if rng else unigram_viterbi(word, model)
            parts[k] = " ".join(seg.serialize(marker))
        out.append("".join(parts))
    return SentenceList(out)


def detokenize_corpus(sentences: Iterable[str], marker: str = DEFAULT_MARKER) -> SentenceList:
    return SentenceList(detokenize(s, marker) for s in sentences)


def save_model(path: PathLike, model: SubwordModel) -> None:
    if isinstance(model, MergeTable):
        write_merges(path, model)
    else:
        write_vocab(path, model)


def load_model(path: PathLike, model_type: str) -> SubwordModel:
    if model_type == "bpe":
        return read_merges(Path(path))
    if model_type == "unigram":
        return read_vocab(Path(path))
    raise ValueError(f"unknown model type {model_type!r}")
