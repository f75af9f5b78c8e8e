"""Seeded synthetic noise: per-word misspelling and per-sentence case changing.

Every sentence gets its own random stream keyed by ``(master_seed, sentence_index)``,
so the output does not depend on how sentences are scheduled across workers.
Within a selected unit the draws happen in a fixed order: selection, strategy,
position, payload.
"""

from __future__ import annotations

import csv
import enum
import re
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Protocol

from .corpus_io import PathLike, SentenceList
from .seeding import stream

QWERTY_ROWS = ("qwertyuiop", "asdfghjkl", "zxcvbnm")

# Row-internal left/right neighbours plus the staggered vertical rule: the letter in
# column k of a lower row touches columns k and k+1 of the row above (and, by symmetry,
# columns k-1 and k of the row below).
QWERTY_NEIGHBORS: dict[str, frozenset[str]] = {
    "q": frozenset("wa"),
    "w": frozenset("qeas"),
    "e": frozenset("wrsd"),
    "r": frozenset("etdf"),
    "t": frozenset("ryfg"),
    "y": frozenset("tugh"),
    "u": frozenset("yihj"),
    "i": frozenset("uojk"),
    "o": frozenset("ipkl"),
    "p": frozenset("ol"),
    "a": frozenset("sqwz"),
    "s": frozenset("adwexz"),
    "d": frozenset("sferxc"),
    "f": frozenset("dgrtcv"),
    "g": frozenset("fhtyvb"),
    "h": frozenset("gjyubn"),
    "j": frozenset("hkuinm"),
    "k": frozenset("jliom"),
    "l": frozenset("kop"),
    "z": frozenset("xas"),
    "x": frozenset("zcsd"),
    "c": frozenset("xvdf"),
    "v": frozenset("cbfg"),
    "b": frozenset("vngh"),
    "n": frozenset("bmhj"),
    "m": frozenset("njk"),
}

INSERTION_ALPHABET = string.ascii_lowercase


class Kind(str, enum.Enum):
    MISSPELLING = "misspelling"
    CASE_CHANGING = "case_changing"


class LanguageMode(str, enum.Enum):
    DEFAULT = "default"
    JAPANESE = "japanese"


class Strategy(str, enum.Enum):
    DELETION = "deletion"
    INSERTION = "insertion"
    SUBSTITUTION = "substitution"
    REPETITION = "repetition"
    UPPER = "upper"
    LOWER = "lower"
    TITLE = "title"


DEFAULT_STRATEGIES = (Strategy.DELETION, Strategy.INSERTION, Strategy.SUBSTITUTION)
JAPANESE_STRATEGIES = (Strategy.DELETION, Strategy.REPETITION)
CASE_STRATEGIES = (Strategy.UPPER, Strategy.LOWER, Strategy.TITLE)


@dataclass(frozen=True)
class PerturbationSpec:
    kind: Kind
    probability: float
    language_mode: LanguageMode = LanguageMode.DEFAULT
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "language_mode", LanguageMode(self.language_mode))
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.probability}")
        if self.language_mode is LanguageMode.JAPANESE and self.kind is not Kind.MISSPELLING:
            raise ValueError("japanese mode only supports misspelling")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "probability": self.probability,
            "language_mode": self.language_mode.value,
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class PerturbationRecord:
    sentence_index: int
    unit_index: int
    strategy: Strategy
    original: str
    perturbed: str


@dataclass
class PerturbationLog:
    """Edits actually applied, plus unit/selection counts for rate checks.

    ``n_selected`` counts units that won the selection draw; a selected unit
    whose edit turns out to be a no-op (e.g. lower-casing an already lower-case
    sentence) is counted there but not recorded.
    """

    records: list[PerturbationRecord] = field(default_factory=list)
    n_units: int = 0
    n_selected: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def extend(self, other: "PerturbationLog") -> None:
        self.records.extend(other.records)
        self.n_units += other.n_units
        self.n_selected += other.n_selected

    def write_tsv(self, path: PathLike) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
            writer.writerow(["sentence_index", "unit_index", "strategy", "original", "perturbed"])
            for r in self.records:
                writer.writerow([r.sentence_index, r.unit_index, r.strategy.value, r.original, r.perturbed])

    @classmethod
    def read_tsv(cls, path: PathLike) -> "PerturbationLog":
        log = cls()
        with Path(path).open(encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f, delimiter="\t"):
                log.records.append(
                    PerturbationRecord(
                        int(row["sentence_index"]),
                        int(row["unit_index"]),
                        Strategy(row["strategy"]),
                        row["original"],
                        row["perturbed"],
                    )
                )
        return log


class RandomStream(Protocol):
    """The subset of ``numpy.random.Generator`` the perturbations draw from."""

    def random(self) -> float: ...

    def integers(self, high: int) -> int: ...


def qwerty_neighbors(c: str) -> frozenset[str]:
    """Keyboard neighbours of an ASCII letter, in the letter's case; empty otherwise."""
    neighbors = QWERTY_NEIGHBORS.get(c.lower()) if len(c) == 1 and c.isascii() else None
    if not neighbors:
        return frozenset()
    if c.isupper():
        return frozenset(n.upper() for n in neighbors)
    return neighbors


def _draw(rng: RandomStream, n: int) -> int:
    return int(rng.integers(n))


def misspell_word(
    word: str,
    rng: RandomStream,
    mode: LanguageMode = LanguageMode.DEFAULT,
    allow_deletion_to_empty: bool = False,
) -> tuple[str, Optional[Strategy]]:
    """Apply exactly one character edit to ``word``.

    Returns ``(new_word, strategy)``; strategy is ``None`` when no edit applies
    and the word comes back unchanged. Deletion is never applied to a single
    character word unless ``allow_deletion_to_empty`` is set.
    """
    mode = LanguageMode(mode)
    if not word:
        return word, None
    can_delete = len(word) >= 2 or allow_deletion_to_empty
    if mode is LanguageMode.JAPANESE:
        options = [s for s in JAPANESE_STRATEGIES if s is not Strategy.DELETION or can_delete]
    else:
        sub_positions = [i for i, ch in enumerate(word) if qwerty_neighbors(ch)]
        options = [Strategy.INSERTION]
        if can_delete:
            options.insert(0, Strategy.DELETION)
        if sub_positions:
            options.append(Strategy.SUBSTITUTION)
    if not options:
        return word, None

    strategy = options[_draw(rng, len(options))]
    if strategy is Strategy.DELETION:
        i = _draw(rng, len(word))
        return word[:i] + word[i + 1 :], strategy
    if strategy is Strategy.REPETITION:
        i = _draw(rng, len(word))
        return word[: i + 1] + word[i:], strategy
    if strategy is Strategy.INSERTION:
        i = _draw(rng, len(word) + 1)
        ch = INSERTION_ALPHABET[_draw(rng, len(INSERTION_ALPHABET))]
        neighbor = word[i - 1] if i > 0 else word[0]
        if neighbor.isupper():
            ch = ch.upper()
        return word[:i] + ch + word[i:], strategy
    i = sub_positions[_draw(rng, len(sub_positions))]
    choices = sorted(qwerty_neighbors(word[i]))
    return word[:i] + choices[_draw(rng, len(choices))] + word[i + 1 :], strategy


_WHITESPACE_SPLIT = re.compile(r"(\s+)")


def _misspell_sentence(
    sentence: str, index: int, spec: PerturbationSpec
) -> tuple[str, PerturbationLog]:
    rng = stream(spec.master_seed, index)
    log = PerturbationLog()
    if spec.language_mode is LanguageMode.JAPANESE:
        positions = [i for i, ch in enumerate(sentence) if not ch.isspace()]
        out = []
        kept = 0
        last = positions[-1] if positions else -1
        for i, ch in enumerate(sentence):
            if ch.isspace():
                out.append(ch)
                continue
            log.n_units += 1
            new = ch
            if rng.random() < spec.probability:
                log.n_selected += 1
                # the last character may only be deleted if something else survives
                new, strategy = misspell_word(
                    ch, rng, LanguageMode.JAPANESE, allow_deletion_to_empty=(kept > 0 or i != last)
                )
                log.records.append(PerturbationRecord(index, i, strategy, ch, new))
            kept += bool(new)
            out.append(new)
        return "".join(out), log

    parts = _WHITESPACE_SPLIT.split(sentence)
    unit = 0
    for j, token in enumerate(parts):
        if not token or token.isspace():
            continue
        log.n_units += 1
        if rng.random() < spec.probability:
            log.n_selected += 1
            new, strategy = misspell_word(token, rng)
            if strategy is not None:
                parts[j] = new
                log.records.append(PerturbationRecord(index, unit, strategy, token, new))
        unit += 1
    return "".join(parts), log


def title_case_words(sentence: str) -> str:
    """Upper-case the first character of each whitespace-delimited word, lower-case the rest."""
    parts = _WHITESPACE_SPLIT.split(sentence)
    return "".join(p if p.isspace() else _upper(p[:1]) + _lower(p[1:]) for p in parts)


def _upper(text: str) -> str:
    # only mappings that lower-casing undoes exactly ("ß", "µ" and dotless "ı" are left alone)
    return "".join(u if len(u := ch.upper()) == 1 and u.lower() == ch.lower() else ch for ch in text)


def _lower(text: str) -> str:
    return "".join(l if len(l := ch.lower()) == 1 else ch for ch in text)


CASE_TRANSFORMS = {Strategy.UPPER: _upper, Strategy.LOWER: _lower, Strategy.TITLE: title_case_words}


def _recase_sentence(
    sentence: str, index: int, spec: PerturbationSpec
) -> tuple[str, PerturbationLog]:
    rng = stream(spec.master_seed, index)
    log = PerturbationLog(n_units=1)
    if rng.random() >= spec.probability:
        return sentence, log
    log.n_selected = 1
    strategy = CASE_STRATEGIES[_draw(rng, len(CASE_STRATEGIES))]
    new = CASE_TRANSFORMS[strategy](sentence)
    if new != sentence:
        log.records.append(PerturbationRecord(index, 0, strategy, sentence, new))
    return new, log


def _apply(
    sentences: Iterable[str], spec: PerturbationSpec, fn
) -> tuple[SentenceList, PerturbationLog]:
    out = []
    log = PerturbationLog()
    for i, sentence in enumerate(sentences):
        new, sentence_log = fn(sentence, i, spec)
        out.append(new)
        log.extend(sentence_log)
    return SentenceList(out), log


def perturb_misspelling(
    sentences: Iterable[str], spec: PerturbationSpec
) -> tuple[SentenceList, PerturbationLog]:
    if spec.kind is not Kind.MISSPELLING:
        raise ValueError(f"expected a misspelling spec, got {spec.kind.value}")
    return _apply(sentences, spec, _misspell_sentence)


def perturb_casing(
    sentences: Iterable[str], spec: PerturbationSpec
) -> tuple[SentenceList, PerturbationLog]:
    if spec.kind is not Kind.CASE_CHANGING:
        raise ValueError(f"expected a case-changing spec, got {spec.kind.value}")
    return _apply(sentences, spec, _recase_sentence)


def perturb_sentence(sentence: str, index: int, spec: PerturbationSpec) -> tuple[str, PerturbationLog]:
    """Perturb one sentence as if it sat at position ``index`` of a corpus.

    Any split of a corpus across workers gives the same result as
    :func:`perturb` as long as each sentence keeps its original index.
    """
    fn = _misspell_sentence if spec.kind is Kind.MISSPELLING else _recase_sentence
    return fn(sentence, index, spec)


def perturb(sentences: Iterable[str], spec: PerturbationSpec) -> tuple[SentenceList, PerturbationLog]:
    """Dispatch on ``spec.kind``."""
    if spec.kind is Kind.MISSPELLING:
        return perturb_misspelling(sentences, spec)
    return perturb_casing(sentences, spec)
