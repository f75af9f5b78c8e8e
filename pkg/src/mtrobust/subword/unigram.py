"""Unigram language-model segmentation.

A word's segmentations form a lattice over character positions; an edge
(i, j) exists when ``word[i:j]`` is a vocabulary piece. Viterbi finds the
best path, forward filtering / backward sampling draws a path with
probability proportional to ``prod(p(piece)) ** alpha``, and EM training runs
forward-backward over the same lattice.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..perturbation import RandomStream
from .segmentation import Segmentation

DEFAULT_ALPHA = 0.2
UNKNOWN_PENALTY = 10.0


@dataclass(frozen=True)
class UnigramVocab:
    """Piece -> log-probability."""

    log_probs: Mapping[str, float]

    def __post_init__(self):
        lp = dict(self.log_probs)
        if any(p == "" for p in lp):
            raise ValueError("empty piece in vocabulary")
        total = math.fsum(math.exp(v) for v in lp.values())
        if total > 1 + 1e-6:
            raise ValueError(f"piece probabilities sum to {total:.8f} > 1")
        object.__setattr__(self, "log_probs", lp)
        object.__setattr__(self, "_max_len", max((len(p) for p in lp), default=1))
        object.__setattr__(self, "_unk", min(lp.values(), default=0.0) - UNKNOWN_PENALTY)

    def __len__(self) -> int:
        return len(self.log_probs)

    def __contains__(self, piece: str) -> bool:
        return piece in self.log_probs

    @property
    def max_piece_length(self) -> int:
        return self._max_len

    @property
    def unknown_log_prob(self) -> float:
        return self._unk

    def edges(self, word: str, exclude: Optional[str] = None) -> tuple[list[list[tuple[int, float]]], bool]:
        """Incoming lattice edges per end position: ``ends[j] = [(i, log_prob), ...]``.

        Characters missing from the vocabulary get a single-character edge at
        the floor log-probability; the second return value flags that.
        """
        lp = self.log_probs
        n = len(word)
        ends: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
        fallback = False
        for i in range(n):
            for j in range(i + 1, min(n, i + self._max_len) + 1):
                piece = word[i:j]
                v = lp.get(piece)
                if v is not None and piece != exclude:
                    ends[j].append((i, v))
            if word[i] not in lp:
                ends[i + 1].append((i, self._unk))
                fallback = True
        return ends, fallback


def unigram_viterbi(word: str, vocab: UnigramVocab, exclude: Optional[str] = None) -> Segmentation:
    """Most probable segmentation.

    Exact score ties go to fewer pieces, then to the lexicographically smaller
    piece sequence. ``exclude`` hides one piece, which pruning uses to find a
    piece's best alternative segmentation.
    """
    if not word:
        return Segmentation(())
    ends, fallback = vocab.edges(word, exclude)
    n = len(word)
    # best[j] = (score, n_pieces, pieces, piece log-probs). Scores are correctly
    # rounded sums (fsum), so paths that reorder the same pieces tie exactly
    # instead of differing in the last bit.
    best: list[Optional[tuple[float, int, tuple[str, ...], tuple[float, ...]]]] = [None] * (n + 1)
    best[0] = (0.0, 0, (), ())
    for j in range(1, n + 1):
        for i, v in ends[j]:
            prev = best[i]
            if prev is None:
                continue
            values = prev[3] + (v,)
            cand = (math.fsum(values), prev[1] + 1, prev[2] + (word[i:j],), values)
            cur = best[j]
            if cur is None or (-cand[0], cand[1], cand[2]) < (-cur[0], cur[1], cur[2]):
                best[j] = cand
    return Segmentation(best[n][2], fallback)


def _forward(ends, n: int, alpha: float) -> np.ndarray:
    fwd = np.full(n + 1, -np.inf)
    fwd[0] = 0.0
    for j in range(1, n + 1):
        terms = [fwd[i] + alpha * v for i, v in ends[j]]
        if terms:
            fwd[j] = np.logaddexp.reduce(terms)
    return fwd


def unigram_sample(
    word: str, vocab: UnigramVocab, alpha: float = DEFAULT_ALPHA, rng: RandomStream = None
) -> Segmentation:
    """Draw a segmentation with probability proportional to ``prod(p) ** alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    if not word:
        return Segmentation(())
    ends, fallback = vocab.edges(word)
    n = len(word)
    fwd = _forward(ends, n, alpha)
    pieces = []
    j = n
    while j > 0:
        starts = [i for i, _ in ends[j]]
        logw = np.array([fwd[i] + alpha * v for i, v in ends[j]])
        w = np.exp(logw - logw.max())
        cdf = np.cumsum(w)
        k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        i = starts[min(k, len(starts) - 1)]
        pieces.append(word[i:j])
        j = i
    return Segmentation(tuple(reversed(pieces)), fallback)


def segmentation_log_prob(pieces, vocab: UnigramVocab) -> float:
    return math.fsum(vocab.log_probs.get(p, vocab.unknown_log_prob) for p in pieces)


# --- training --------------------------------------------------------------------


@dataclass(frozen=True)
class UnigramTrainerConfig:
    seed_max_piece_len: int = 8
    seed_min_frequency: int = 2
    prune_fraction: float = 0.2
    em_iterations: int = 2


def _expected_counts(word_freqs: Mapping[str, int], vocab: UnigramVocab) -> tuple[Counter, float]:
    """E-step: expected piece counts under the posterior over segmentations, and log-likelihood."""
    counts: Counter = Counter()
    loglik = 0.0
    for word, freq in word_freqs.items():
        ends, _ = vocab.edges(word)
        n = len(word)
        fwd = _forward(ends, n, 1.0)
        bwd = np.full(n + 1, -np.inf)
        bwd[n] = 0.0
        starts: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
        for j in range(n + 1):
            for i, v in ends[j]:
                starts[i].append((j, v))
        for i in range(n - 1, -1, -1):
            terms = [v + bwd[j] for j, v in starts[i]]
            if terms:
                bwd[i] = np.logaddexp.reduce(terms)
        z = fwd[n]
        loglik += freq * z
        for j in range(1, n + 1):
            for i, v in ends[j]:
                post = math.exp(fwd[i] + v + bwd[j] - z)
                if post > 0:
                    counts[word[i:j]] += freq * post
    return counts, float(loglik)


def corpus_log_likelihood(word_freqs: Mapping[str, int], vocab: UnigramVocab) -> float:
    """Sum over words of ``freq * log sum_{segmentations} prod p(piece)``."""
    return _expected_counts(word_freqs, vocab)[1]


def em_step(word_freqs: Mapping[str, int], vocab: UnigramVocab) -> tuple[UnigramVocab, float]:
    """One EM iteration at fixed piece set. Returns the new vocab and the log-likelihood before the update."""
    counts, loglik = _expected_counts(word_freqs, vocab)
    total = math.fsum(counts.values())
    new = {p: math.log(max(counts.get(p, 0.0), 1e-300) / total) for p in vocab.log_probs}
    # renormalize so floor-clamped pieces do not push the mass over 1
    log_z = math.log(math.fsum(math.exp(v) for v in new.values()))
    return UnigramVocab({p: v - log_z for p, v in new.items()}), loglik


def _seed_vocab(word_freqs: Mapping[str, int], config: UnigramTrainerConfig) -> UnigramVocab:
    freq: Counter = Counter()
    chars: set[str] = set()
    for word, f in word_freqs.items():
        chars.update(word)
        n = len(word)
        for i in range(n):
            for j in range(i + 1, min(n, i + config.seed_max_piece_len) + 1):
                freq[word[i:j]] += f
    pieces = {p: c for p, c in freq.items() if len(p) == 1 or c >= config.seed_min_frequency}
    total = sum(pieces.values())
    return UnigramVocab({p: math.log(c / total) for p, c in pieces.items()})


def _piece_losses(word_freqs: Mapping[str, int], vocab: UnigramVocab) -> dict[str, float]:
    """Approximate likelihood loss from removing each multi-character piece.

    A removed piece's occurrences are re-segmented with its own best
    alternative segmentation; the loss is the resulting drop in Viterbi
    log-likelihood, weighted by how often the piece is used.
    """
    usage: Counter = Counter()
    for word, f in word_freqs.items():
        for p in unigram_viterbi(word, vocab).pieces:
            usage[p] += f
    total = sum(usage.values())
    log_total = math.log(total)
    losses = {}
    for piece, lp in vocab.log_probs.items():
        if len(piece) == 1:
            continue
        f = usage.get(piece, 0)
        if f == 0:
            losses[piece] = 0.0
            continue
        alt = unigram_viterbi(piece, vocab, exclude=piece).pieces
        log_total_alt = math.log(total + f * (len(alt) - 1))
        lp_here = math.log(f) - log_total
        lp_alt = sum(math.log(usage.get(a, 0) + f) - log_total_alt for a in alt)
        losses[piece] = (f / total) * (lp_here - lp_alt)
    return losses


def unigram_train(
    word_frequencies: Mapping[str, int],
    target_vocab_size: int,
    config: UnigramTrainerConfig = UnigramTrainerConfig(),
    seed_vocab: Optional[UnigramVocab] = None,
) -> UnigramVocab:
    """EM + pruning from a substring seed vocabulary down to ``target_vocab_size`` pieces.

    Single characters are never pruned, so the target cannot go below the
    number of distinct characters.
    """
    word_freqs = {w: int(f) for w, f in word_frequencies.items() if w and f > 0}
    if not word_freqs:
        raise ValueError("empty frequency table")
    n_chars = len({c for w in word_freqs for c in w})
    if target_vocab_size < n_chars:
        raise ValueError(
            f"target vocabulary size {target_vocab_size} is below the {n_chars} distinct characters"
        )
    vocab = seed_vocab or _seed_vocab(word_freqs, config)
    while True:
        for _ in range(config.em_iterations):
            vocab, _ = em_step(word_freqs, vocab)
        excess = len(vocab) - target_vocab_size
        if excess <= 0:
            return vocab
        losses = _piece_losses(word_freqs, vocab)
        n_drop = min(excess, max(1, int(len(losses) * config.prune_fraction)))
        doomed = set(sorted(losses, key=lambda p: (losses[p], p))[:n_drop])
        kept = {p: v for p, v in vocab.log_probs.items() if p not in doomed}
        log_z = math.log(math.fsum(math.exp(v) for v in kept.values()))
        vocab = UnigramVocab({p: v - log_z for p, v in kept.items()})


def write_vocab(path, vocab: UnigramVocab) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for piece, lp in sorted(vocab.log_probs.items(), key=lambda kv: (-kv[1], kv[0])):
            f.write(f"{piece}\t{lp!r}\n")


def read_vocab(path) -> UnigramVocab:
    lp = {}
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            piece, sep, value = line.rpartition("\t")
            if not sep:
                raise ValueError(f"{path}:{n}: expected 'piece<TAB>log_prob'")
            lp[piece] = float(value)
    return UnigramVocab(lp)
