from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from mtrobust.seeding import stream
from mtrobust.subword import (
    UnigramTrainerConfig,
    UnigramVocab,
    corpus_log_likelihood,
    detokenize,
    em_step,
    read_vocab,
    unigram_sample,
    unigram_train,
    unigram_viterbi,
    write_vocab,
)
from mtrobust.synthetic import make_corpus

AB = UnigramVocab({"ab": -1.0, "a": -2.0, "b": -2.0})


def all_segmentations(word):
    n = len(word)
    for cuts in itertools.product((False, True), repeat=n - 1):
        pieces, start = [], 0
        for i, cut in enumerate(cuts, 1):
            if cut:
                pieces.append(word[start:i])
                start = i
        pieces.append(word[start:])
        yield tuple(pieces)


def path_score(pieces, log_probs):
    # correctly rounded, so the order of the pieces cannot matter
    return math.fsum(log_probs[p] for p in pieces)


def brute_force_best(word, log_probs):
    valid = [s for s in all_segmentations(word) if all(p in log_probs for p in s)]
    return min(valid, key=lambda s: (-path_score(s, log_probs), len(s), s))


def random_vocab(rng, alphabet="abc", n_multi=12, integer=False):
    pieces = set(alphabet)
    while len(pieces) < len(alphabet) + n_multi:
        pieces.add("".join(rng.choice(alphabet) for _ in range(rng.randint(2, 4))))
    pieces = sorted(pieces)
    if integer:
        return {p: float(rng.randint(-6, -3)) for p in pieces}
    weights = [rng.random() + 1e-3 for _ in pieces]
    total = sum(weights)
    return {p: math.log(w / total) for p, w in zip(pieces, weights)}


# Viterbi


def test_viterbi_prefers_whole_piece():
    assert unigram_viterbi("ab", AB).pieces == ("ab",)


def test_character_vocab_gives_characters():
    vocab = UnigramVocab({c: math.log(1 / 3) for c in "abc"})
    assert unigram_viterbi("cabba", vocab).pieces == tuple("cabba")


def test_reordered_pieces_tie_exactly():
    # same pieces in a different order; naive left-to-right sums differ in the last bit here
    log_probs = {"a": -3.9, "c": -2.6, "cc": -4.3}
    assert unigram_viterbi("accc", UnigramVocab(log_probs)).pieces == ("a", "c", "cc")


def test_viterbi_tie_break():
    # "aaa" = a+aa = aa+a = a+a+a; the two-piece paths tie on score and length
    vocab = UnigramVocab({"a": -2.0, "aa": -4.0})
    assert unigram_viterbi("aaa", vocab).pieces == ("a", "aa")
    # equal score, fewer pieces wins
    vocab = UnigramVocab({"a": -2.0, "aa": -4.0, "b": -3.0})
    assert unigram_viterbi("aa", vocab).pieces == ("aa",)


@pytest.mark.parametrize("integer", [False, True])
def test_viterbi_matches_exhaustive_search(integer):
    rng = random.Random(7 + integer)
    for _ in range(50):
        log_probs = random_vocab(rng, integer=integer)
        vocab = UnigramVocab(log_probs)
        for _ in range(10):
            word = "".join(rng.choice("abc") for _ in range(rng.randint(1, 10)))
            assert unigram_viterbi(word, vocab).pieces == brute_force_best(word, log_probs), word


def test_unknown_characters_fall_back():
    seg = unigram_viterbi("axb", AB)
    assert seg.pieces == ("a", "x", "b")
    assert seg.fallback
    assert not unigram_viterbi("ab", AB).fallback


# sampling


def test_sampling_probability_of_whole_piece():
    rng = np.random.default_rng(0)
    hits = sum(unigram_sample("ab", AB, 1.0, rng).pieces == ("ab",) for _ in range(10_000))
    expected = math.exp(-1) / (math.exp(-1) + math.exp(-4))
    assert abs(hits / 10_000 - expected) <= 0.01


def test_sampling_matches_lattice_distribution():
    log_probs = {"a": -2.0, "b": -2.2, "c": -2.5, "ab": -2.4, "bc": -2.8, "ca": -3.0, "abc": -3.2, "bca": -3.5}
    vocab = UnigramVocab(log_probs)
    word, alpha = "abca", 0.7
    paths = [s for s in all_segmentations(word) if all(p in log_probs for p in s)]
    weights = np.array([math.exp(alpha * path_score(s, log_probs)) for s in paths])
    probs = weights / weights.sum()
    rng = np.random.default_rng(1)
    draws = Counter(unigram_sample(word, vocab, alpha, rng).pieces for _ in range(10_000))
    assert set(draws) <= set(paths)
    observed = np.array([draws[s] for s in paths])
    assert chisquare(observed, probs * 10_000).pvalue > 0.01


def test_sharp_sampling_follows_viterbi():
    rng = random.Random(3)
    log_probs = random_vocab(rng)
    vocab = UnigramVocab(log_probs)
    words = ["".join(rng.choice("abc") for _ in range(rng.randint(2, 8))) for _ in range(20)]
    gen = np.random.default_rng(2)
    agree = total = 0
    for word in words:
        best = unigram_viterbi(word, vocab).pieces
        for _ in range(50):
            agree += unigram_sample(word, vocab, 100.0, gen).pieces == best
            total += 1
    assert agree / total >= 0.99


def test_single_character_word():
    for k in range(20):
        assert unigram_sample("a", AB, 0.2, stream(k)).pieces == ("a",)


def test_sampling_alpha_must_be_positive():
    with pytest.raises(ValueError):
        unigram_sample("ab", AB, 0.0, stream(0))


@settings(max_examples=300, deadline=None)
@given(st.text(min_size=1, max_size=20), st.floats(0.05, 5.0), st.integers(0, 2**32))
def test_round_trip_any_unicode(word, alpha, seed):
    vocab = UnigramVocab({"ab": -1.5, "a": -2.0, "b": -2.0, "é": -3.0, "猫が": -3.0})
    for seg in (unigram_viterbi(word, vocab), unigram_sample(word, vocab, alpha, stream(seed))):
        assert seg.word() == word
        if "@@" not in word:
            assert detokenize(seg.serialize()) == word


# vocabulary and training


def test_vocab_validation():
    with pytest.raises(ValueError):
        UnigramVocab({"a": math.log(0.7), "b": math.log(0.7)})
    with pytest.raises(ValueError):
        UnigramVocab({"": -1.0})


def test_two_piece_lattice_training():
    seed = UnigramVocab({p: math.log(1 / 3) for p in ("a", "b", "ab")})
    vocab = unigram_train({"ab": 10}, 3, seed_vocab=seed)
    assert set(vocab.log_probs) == {"a", "b", "ab"}
    assert max(vocab.log_probs, key=vocab.log_probs.get) == "ab"


def test_training_to_character_count_keeps_only_characters():
    freqs = {"abc": 5, "abd": 3, "cab": 2}
    vocab = unigram_train(freqs, 4)
    assert set(vocab.log_probs) == set("abcd")


def test_training_target_below_characters_rejected():
    with pytest.raises(ValueError):
        unigram_train({"abc": 1}, 2)


def test_em_never_lowers_likelihood():
    src, _ = make_corpus(100, seed=2, vocab_size=200)
    freqs = Counter(w for s in src for w in s.split())
    vocab = unigram_train(freqs, 400, UnigramTrainerConfig(em_iterations=0))
    history = [corpus_log_likelihood(freqs, vocab)]
    for _ in range(6):
        vocab, before = em_step(freqs, vocab)
        assert before == pytest.approx(history[-1], rel=1e-12)
        history.append(corpus_log_likelihood(freqs, vocab))
    for a, b in zip(history, history[1:]):
        assert b >= a - 1e-9 * abs(a)
    assert history[-1] > history[0]


def test_trained_vocab_properties():
    src, _ = make_corpus(200, seed=3, vocab_size=300)
    freqs = Counter(w for s in src for w in s.split())
    chars = {c for w in freqs for c in w}
    vocab = unigram_train(freqs, 150)
    assert chars <= set(vocab.log_probs)
    assert len(vocab) <= 150
    assert math.fsum(math.exp(v) for v in vocab.log_probs.values()) <= 1 + 1e-6
    assert any(len(p) > 1 for p in vocab.log_probs)
    for w in list(freqs)[:100]:
        seg = unigram_viterbi(w, vocab)
        assert seg.word() == w and not seg.fallback


def test_vocab_file_round_trip(tmp_path):
    vocab = UnigramVocab({"ab": -1.0 / 3, "a": -2.5, "b\tc": -7.125, "é": -9.0})
    write_vocab(tmp_path / "v.tsv", vocab)
    assert read_vocab(tmp_path / "v.tsv") == vocab


def test_malformed_vocab_file(tmp_path):
    (tmp_path / "v.tsv").write_text("piece-without-tab\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_vocab(tmp_path / "v.tsv")
