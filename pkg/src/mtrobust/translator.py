"""Access to the system under test: a subprocess, a hypothesis file, or a built-in stub.

The stubs exist so that the whole pipeline can run without an MT model:

* ``identity`` returns its input.
* ``degrading`` emits a pseudo-translation (case-folded words in reverse
  order) that ignores the noise in its input, except that each word is
  corrupted with probability ``sensitivity * f``, where ``f`` is the fraction
  of the word's characters that the perturbation changed. A more sensitive
  stub therefore loses more quality on noisier input.
"""

from __future__ import annotations

import enum
import logging
import shlex
import subprocess
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus_io import SentenceList, load_lines
from .errors import DataError, TranslatorError
from .perturbation import RandomStream
from .seeding import stream

LOGGER = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 600.0


class TranslatorKind(str, enum.Enum):
    COMMAND = "command"
    FILE = "file"
    STUB = "stub"


class StubName(str, enum.Enum):
    IDENTITY = "identity"
    DEGRADING = "degrading"


@dataclass(frozen=True)
class StubConfig:
    name: StubName = StubName.IDENTITY
    sensitivity: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "name", StubName(self.name))
        if not 0.0 <= self.sensitivity <= 1.0:
            raise ValueError(f"sensitivity must lie in [0, 1], got {self.sensitivity}")


@dataclass(frozen=True)
class TranslatorSpec:
    kind: TranslatorKind
    command_line: Optional[str] = None
    hyp_path: Optional[str] = None
    stub_config: Optional[StubConfig] = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        object.__setattr__(self, "kind", TranslatorKind(self.kind))
        payloads = {
            TranslatorKind.COMMAND: self.command_line,
            TranslatorKind.FILE: self.hyp_path,
            TranslatorKind.STUB: self.stub_config,
        }
        present = [k for k, v in payloads.items() if v is not None]
        if present != [self.kind]:
            raise ValueError(f"{self.kind.value} translator needs exactly its own payload, got {present}")

    @classmethod
    def parse(cls, text: str, timeout: float = DEFAULT_TIMEOUT) -> "TranslatorSpec":
        """Parse ``cmd:<command>``, ``file:<path>``, ``stub:identity`` or ``stub:degrading,s=<x>,seed=<n>``."""
        prefix, sep, rest = text.partition(":")
        if not sep or not rest:
            raise ValueError(f"bad translator spec {text!r}")
        if prefix == "cmd":
            return cls(TranslatorKind.COMMAND, command_line=rest, timeout=timeout)
        if prefix == "file":
            return cls(TranslatorKind.FILE, hyp_path=rest, timeout=timeout)
        if prefix == "stub":
            name, *options = rest.split(",")
            kwargs = {}
            for option in options:
                key, _, value = option.partition("=")
                if key in ("s", "sensitivity"):
                    kwargs["sensitivity"] = float(value)
                elif key == "seed":
                    kwargs["seed"] = int(value)
                else:
                    raise ValueError(f"unknown stub option {key!r} in {text!r}")
            return cls(TranslatorKind.STUB, stub_config=StubConfig(name, **kwargs), timeout=timeout)
        raise ValueError(f"unknown translator kind {prefix!r} in {text!r}")

    def label(self) -> str:
        if self.kind is TranslatorKind.COMMAND:
            return f"cmd:{self.command_line}"
        if self.kind is TranslatorKind.FILE:
            return f"file:{self.hyp_path}"
        stub = self.stub_config
        if stub.name is StubName.IDENTITY:
            return "stub:identity"
        return f"stub:degrading,s={stub.sensitivity:g},seed={stub.seed}"


def _levenshtein(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def perturbed_fraction(word: str, clean_word: str) -> float:
    """Share of a word's characters changed relative to its clean form (case-insensitive), capped at 1."""
    a, b = word.casefold(), clean_word.casefold()
    if a == b:
        return 0.0
    return min(1.0, _levenshtein(a, b) / max(len(a), len(b)))


def _scramble(word: str) -> Optional[str]:
    # rotate left by one; None (drop) when rotation cannot change the word
    if len(set(word)) < 2:
        return None
    return word[1:] + word[0]


def degrading_stub(
    sentence: str, sensitivity: float, rng: RandomStream, clean: Optional[str] = None
) -> str:
    """Pseudo-translate one sentence.

    ``clean`` is the unperturbed version of ``sentence``; when given (and it
    has the same number of words) each word is translated from its clean
    counterpart and is corrupted with probability ``sensitivity`` times the
    fraction of its characters that differ. One uniform draw is made per
    word whether or not it is corrupted.
    """
    if not 0.0 <= sensitivity <= 1.0:
        raise ValueError(f"sensitivity must lie in [0, 1], got {sensitivity}")
    words = sentence.split()
    clean_words = clean.split() if clean is not None else None
    if clean_words is not None and len(clean_words) != len(words):
        clean_words = None
    out = []
    for k, word in enumerate(words):
        base = clean_words[k] if clean_words else word
        canonical = base.casefold()
        flagged = perturbed_fraction(word, base) if clean_words else 0.0
        u = rng.random()
        if u < sensitivity * flagged:
            scrambled = _scramble(canonical)
            if scrambled is None:
                continue
            canonical = scrambled
        out.append(canonical)
    return " ".join(reversed(out))


def _run_command(lines: Sequence[str], spec: TranslatorSpec) -> list[str]:
    argv = shlex.split(spec.command_line)
    payload = "".join(line + "\n" for line in lines)
    try:
        proc = subprocess.run(
            argv,
            input=payload.encode("utf-8"),
            capture_output=True,
            timeout=spec.timeout,
            check=False,
        )
    except FileNotFoundError:
        raise TranslatorError(f"translator command not found: {argv[0]}") from None
    except subprocess.TimeoutExpired:
        raise TranslatorError(f"translator timed out after {spec.timeout:g}s") from None
    if proc.returncode != 0:
        tail = proc.stderr.decode("utf-8", "replace").strip()[-500:]
        raise TranslatorError(f"translator exited with code {proc.returncode}: {tail}")
    try:
        text = proc.stdout.decode("utf-8")
    except UnicodeDecodeError as e:
        raise TranslatorError(f"translator output is not UTF-8 (byte offset {e.start})") from None
    out = text.split("\n")
    if out and out[-1] == "":
        out.pop()
    return out


def translate(
    sentences: Sequence[str], spec: TranslatorSpec, clean: Optional[Sequence[str]] = None
) -> SentenceList:
    """Translate a batch; the output always has one line per input line.

    ``clean`` (the unperturbed source, index-aligned) is only consulted by the
    degrading stub.
    """
    n = len(sentences)
    if spec.kind is TranslatorKind.COMMAND:
        out = _run_command(sentences, spec)
        if len(out) != n:
            raise TranslatorError(f"translator returned {len(out)} lines for {n} inputs")
        return SentenceList(out)
    if spec.kind is TranslatorKind.FILE:
        out = load_lines(spec.hyp_path)
        if len(out) != n:
            raise DataError(f"{spec.hyp_path} has {len(out)} hypotheses for {n} source sentences")
        return out
    stub = spec.stub_config
    if stub.name is StubName.IDENTITY:
        return SentenceList(sentences)
    if clean is not None and len(clean) != n:
        raise DataError(f"clean source has {len(clean)} lines for {n} inputs")
    return SentenceList(
        degrading_stub(s, stub.sensitivity, stream(stub.seed, i), clean[i] if clean is not None else None)
        for i, s in enumerate(sentences)
    )
