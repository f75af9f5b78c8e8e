"""Byte-pair encoding: merge learning, deterministic encoding and BPE-dropout."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..perturbation import RandomStream
from .segmentation import DEFAULT_MARKER, Segmentation

Pair = tuple[str, str]


@dataclass(frozen=True)
class MergeTable:
    """Ordered merges; the rank of a merge is its position in ``merges``."""

    merges: tuple[Pair, ...]
    marker: str = DEFAULT_MARKER
    ranks: dict[Pair, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        merges = tuple((str(a), str(b)) for a, b in self.merges)
        object.__setattr__(self, "merges", merges)
        produced: set[str] = set()
        ranks: dict[Pair, int] = {}
        for i, (a, b) in enumerate(merges):
            if (a, b) in ranks:
                raise ValueError(f"duplicate merge {a!r} {b!r} at position {i}")
            for side in (a, b):
                if len(side) != 1 and side not in produced:
                    raise ValueError(f"merge {i} uses {side!r} before any merge produces it")
            ranks[(a, b)] = i
            produced.add(a + b)
        object.__setattr__(self, "ranks", ranks)

    def __len__(self) -> int:
        return len(self.merges)

    @property
    def merged_symbols(self) -> list[str]:
        return [a + b for a, b in self.merges]

    def vocabulary(self, base_chars: Optional[set[str]] = None) -> set[str]:
        chars = set(base_chars or ())
        for a, b in self.merges:
            chars.update(c for c in (a, b) if len(c) == 1)
        return chars | set(self.merged_symbols)


def _pair_stats(words: list[list[str]], freqs: list[int]):
    counts: Counter = Counter()
    where: dict[Pair, set[int]] = defaultdict(set)
    for w, (symbols, f) in enumerate(zip(words, freqs)):
        for pair in zip(symbols, symbols[1:]):
            counts[pair] += f
            where[pair].add(w)
    return counts, where


def _merge_symbols(symbols: list[str], pair: Pair) -> list[str]:
    a, b = pair
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def bpe_train(
    word_frequencies: Mapping[str, int], num_merges: int, marker: str = DEFAULT_MARKER
) -> MergeTable:
    """Learn up to ``num_merges`` merges greedily from word counts.

    Pair counts include overlapping occurrences ("aaa" holds ("a", "a") twice).
    Ties go to the lexicographically smallest pair. Training stops early once
    no adjacent pair is left.
    """
    if not word_frequencies:
        raise ValueError("empty frequency table")
    if num_merges < 0:
        raise ValueError("num_merges must be >= 0")
    items = sorted((w, int(f)) for w, f in word_frequencies.items() if w and f > 0)
    words = [list(w) for w, _ in items]
    freqs = [f for _, f in items]
    counts, where = _pair_stats(words, freqs)

    merges: list[Pair] = []
    while len(merges) < num_merges:
        counts = +counts  # drop exhausted pairs
        if not counts:
            break
        best = min(counts, key=lambda p: (-counts[p], p))
        merges.append(best)
        for w in sorted(where.pop(best, ())):
            old = words[w]
            new = _merge_symbols(old, best)
            if new == old:
                continue
            f = freqs[w]
            for pair in zip(old, old[1:]):
                counts[pair] -= f
            for pair in zip(new, new[1:]):
                counts[pair] += f
                where[pair].add(w)
            words[w] = new
        counts.pop(best, None)
    return MergeTable(tuple(merges), marker)


def _encode(word: str, table: MergeTable, drop_prob: float, rng: Optional[RandomStream]) -> Segmentation:
    symbols = list(word)
    ranks = table.ranks
    while len(symbols) > 1:
        candidates = []
        for i, pair in enumerate(zip(symbols, symbols[1:])):
            rank = ranks.get(pair)
            if rank is None:
                continue
            if drop_prob > 0 and rng.random() < drop_prob:
                continue
            candidates.append((rank, i))
        if not candidates:
            break
        best_rank = min(candidates)[0]
        a, b = table.merges[best_rank]
        positions = [i for rank, i in candidates if rank == best_rank]
        out = []
        cursor = 0
        for i in positions:
            if i < cursor:  # overlaps the previous merge, e.g. the middle of "aaa"
                continue
            out.extend(symbols[cursor:i])
            out.append(a + b)
            cursor = i + 2
        out.extend(symbols[cursor:])
        symbols = out
    return Segmentation(tuple(symbols))


def bpe_encode(word: str, table: MergeTable) -> Segmentation:
    """Apply merges in learned order, lowest rank first, until none applies."""
    return _encode(word, table, 0.0, None)


def bpe_dropout_encode(word: str, table: MergeTable, drop_prob: float, rng: RandomStream) -> Segmentation:
    """Like :func:`bpe_encode`, but each applicable merge is skipped with ``drop_prob`` at every step."""
    if not 0.0 <= drop_prob <= 1.0:
        raise ValueError(f"drop_prob must lie in [0, 1], got {drop_prob}")
    return _encode(word, table, drop_prob, rng)


def write_merges(path, table: MergeTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#bpe marker={table.marker}\n")
        for a, b in table.merges:
            f.write(f"{a} {b}\n")


def read_merges(path) -> MergeTable:
    marker = DEFAULT_MARKER
    merges: list[Pair] = []
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f):
            line = line.rstrip("\n")
            if n == 0 and line.startswith("#bpe"):
                for option in line.split()[1:]:
                    key, _, value = option.partition("=")
                    if key == "marker":
                        marker = value
                continue
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise ValueError(f"{path}:{n + 1}: expected 'left right', got {line!r}")
            merges.append((parts[0], parts[1]))
    return MergeTable(tuple(merges), marker)


def learn_from_corpus(sentences: Sequence[str], num_merges: int, marker: str = DEFAULT_MARKER) -> MergeTable:
    return bpe_train(Counter(w for s in sentences for w in s.split()), num_merges, marker)
