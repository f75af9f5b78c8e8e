"""Seeded toy corpora for running the pipeline without real data or a real model.

Words are random lowercase strings drawn with Zipfian frequencies; the
reference side starts from what the degrading stub produces for clean input
(words case-folded, order reversed) and then has a share of its words
swapped for other lexicon words, so the stub's clean output scores below 100
and ROBUST and CONSIS do not coincide.
"""

from __future__ import annotations

import string

import numpy as np

from .corpus_io import SentenceList
from .translator import degrading_stub


def make_lexicon(size: int, rng: np.random.Generator, min_len: int = 3, max_len: int = 10) -> list[str]:
    letters = np.array(list(string.ascii_lowercase))
    words: set[str] = set()
    while len(words) < size:
        n = int(rng.integers(min_len, max_len + 1))
        words.add("".join(rng.choice(letters, n)))
    return sorted(words)


def make_corpus(
    n_sentences: int,
    seed: int = 0,
    vocab_size: int = 2000,
    min_words: int = 8,
    max_words: int = 20,
    reference_noise: float = 0.1,
) -> tuple[SentenceList, SentenceList]:
    """Return ``(source, reference)``. Source sentences start with a capital letter."""
    rng = np.random.default_rng(seed)
    lexicon = make_lexicon(vocab_size, rng)
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()
    source = []
    for _ in range(n_sentences):
        n = int(rng.integers(min_words, max_words + 1))
        words = [lexicon[i] for i in rng.choice(vocab_size, n, p=weights)]
        words[0] = words[0].capitalize()
        source.append(" ".join(words))
    reference = []
    for s in source:
        words = degrading_stub(s, 0.0, rng).split()
        for k in range(len(words)):
            if rng.random() < reference_noise:
                words[k] = lexicon[int(rng.integers(vocab_size))]
        reference.append(" ".join(words))
    return SentenceList(source), SentenceList(reference)
