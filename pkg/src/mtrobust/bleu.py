"""Corpus BLEU with mteval-13a tokenization, case-insensitive by default.

N-gram statistics are summed over the whole corpus before any ratio is taken;
corpus BLEU is not an average of sentence scores.
"""

from __future__ import annotations

import enum
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError


class Tokenizer(str, enum.Enum):
    THIRTEEN_A = "13a"
    CHARACTER = "char"


class Smoothing(str, enum.Enum):
    NONE = "none"
    EPSILON = "epsilon"


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    lowercase: bool = True
    tokenizer: Tokenizer = Tokenizer.THIRTEEN_A
    smoothing: Smoothing = Smoothing.NONE
    epsilon: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "tokenizer", Tokenizer(self.tokenizer))
        object.__setattr__(self, "smoothing", Smoothing(self.smoothing))
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.smoothing is Smoothing.EPSILON and not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")


_PUNCT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_AFTER_NONDIGIT = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_BEFORE_NONDIGIT = re.compile(r"([\.,])([^0-9])")
_DASH_AFTER_DIGIT = re.compile(r"([0-9])(-)")


@lru_cache(maxsize=2**16)
def _tokenize_13a_str(line: str) -> str:
    line = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in line:
        line = (
            line.replace("&quot;", '"')
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">")
        )
    line = f" {line} "
    line = _PUNCT.sub(r" \1 ", line)
    line = _PERIOD_COMMA_AFTER_NONDIGIT.sub(r"\1 \2 ", line)
    line = _PERIOD_COMMA_BEFORE_NONDIGIT.sub(r" \1 \2", line)
    line = _DASH_AFTER_DIGIT.sub(r"\1 \2 ", line)
    return " ".join(line.split())


def tokenize_13a(line: str) -> list[str]:
    """Tokenize like mteval-v13a (the WMT default)."""
    return _tokenize_13a_str(line).split()


def tokenize_character(line: str) -> list[str]:
    return [ch for ch in line if not ch.isspace()]


_TOKENIZERS = {Tokenizer.THIRTEEN_A: tokenize_13a, Tokenizer.CHARACTER: tokenize_character}


def tokenize(line: str, config: BleuConfig) -> list[str]:
    if config.lowercase:
        line = line.lower()
    return _TOKENIZERS[config.tokenizer](line.rstrip())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hyp: str, ref: str, config: BleuConfig) -> np.ndarray:
    """Sufficient statistics for one segment.

    Layout: ``[match_1..match_N, total_1..total_N, hyp_len, ref_len]``.
    Corpus statistics are the column sums, which is what bootstrap resampling
    relies on.
    """
    h = tokenize(hyp, config)
    r = tokenize(ref, config)
    n_max = config.max_order
    stats = np.zeros(2 * n_max + 2, dtype=np.int64)
    for n in range(1, n_max + 1):
        hyp_counts = _ngrams(h, n)
        ref_counts = _ngrams(r, n)
        stats[n - 1] = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        stats[n_max + n - 1] = max(len(h) - n + 1, 0)
    stats[-2] = len(h)
    stats[-1] = len(r)
    return stats


def corpus_stats(
    hypotheses: Sequence[str], references: Sequence[str], config: BleuConfig = BleuConfig()
) -> np.ndarray:
    """Per-sentence statistics as an ``(n_sentences, 2N+2)`` integer array."""
    if len(hypotheses) != len(references):
        raise DataError(
            f"length mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if len(hypotheses) == 0:
        raise DataError("cannot score an empty corpus")
    return np.stack([sentence_stats(h, r, config) for h, r in zip(hypotheses, references)])


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU and the statistics it was computed from."""

    score: float
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    @property
    def precisions(self) -> list[Fraction]:
        """Exact per-order precisions; orders with no hypothesis n-grams give 0."""
        return [Fraction(m, t) if t else Fraction(0) for m, t in zip(self.matches, self.totals)]

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": [m / t if t else 0.0 for m, t in zip(self.matches, self.totals)],
            "matches": list(self.matches),
            "totals": list(self.totals),
            "bp": self.brevity_penalty,
            "hyp_len": self.hyp_length,
            "ref_len": self.ref_length,
        }


def bleu_from_stats(stats: Iterable[int], config: BleuConfig = BleuConfig()) -> BleuScore:
    """Compute BLEU from summed sufficient statistics.

    Orders with zero hypothesis n-grams (every hypothesis shorter than n) are
    left out of the geometric mean rather than zeroing the score.
    """
    stats = [int(x) for x in stats]
    n_max = config.max_order
    matches, totals = stats[:n_max], stats[n_max : 2 * n_max]
    hyp_len, ref_len = stats[-2], stats[-1]

    if hyp_len >= ref_len:
        bp = 1.0
    elif hyp_len > 0:
        bp = math.exp(1.0 - ref_len / hyp_len)
    else:
        bp = 0.0

    log_sum = 0.0
    orders = 0
    score = None
    for m, t in zip(matches, totals):
        if t == 0:
            continue
        orders += 1
        if m == 0:
            if config.smoothing is Smoothing.NONE:
                score = 0.0
                break
            log_sum += math.log(config.epsilon / t)
        else:
            log_sum += math.log(m / t)
    if score is None:
        score = 0.0 if orders == 0 or not any(matches) else 100.0 * bp * math.exp(log_sum / orders)
    return BleuScore(min(score, 100.0), tuple(matches), tuple(totals), bp, hyp_len, ref_len)


def corpus_bleu(
    hypotheses: Sequence[str], references: Sequence[str], config: BleuConfig = BleuConfig()
) -> BleuScore:
    """Single-reference corpus BLEU."""
    return bleu_from_stats(corpus_stats(hypotheses, references, config).sum(axis=0), config)
