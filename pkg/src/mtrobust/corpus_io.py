"""Line-oriented sentence files and aligned parallel corpora."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union, overload

from .errors import DataError

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]

_LINE_BREAKS = ("\n", "\r")


@dataclass(frozen=True)
class SentenceList(Sequence[str]):
    """An immutable list of single-line sentences.

    Lines are stripped of leading/trailing whitespace on construction. Empty
    lines are kept: hypothesis files may legitimately contain them.
    """

    lines: tuple[str, ...]
    source_path: Optional[str] = None

    def __init__(self, lines: Iterable[str], source_path: Optional[str] = None):
        cleaned = []
        for i, line in enumerate(lines):
            if not isinstance(line, str):
                raise TypeError(f"line {i} is {type(line).__name__}, expected str")
            stripped = line.strip()
            if any(b in stripped for b in _LINE_BREAKS):
                raise DataError(f"line {i} contains a line break")
            cleaned.append(stripped)
        object.__setattr__(self, "lines", tuple(cleaned))
        object.__setattr__(self, "source_path", source_path)

    def __len__(self) -> int:
        return len(self.lines)

    @overload
    def __getitem__(self, i: int) -> str: ...
    @overload
    def __getitem__(self, i: slice) -> "SentenceList": ...

    def __getitem__(self, i):
        if isinstance(i, slice):
            return SentenceList(self.lines[i], self.source_path)
        return self.lines[i]

    def __iter__(self) -> Iterator[str]:
        return iter(self.lines)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SentenceList):
            return self.lines == other.lines
        if isinstance(other, (list, tuple)):
            return list(self.lines) == list(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.lines)

    def take(self, indices: Iterable[int]) -> "SentenceList":
        return SentenceList((self.lines[i] for i in indices), self.source_path)


def load_lines(path: PathLike) -> SentenceList:
    """Read a UTF-8, newline-terminated text file into a :class:`SentenceList`.

    A single trailing empty line (i.e. the final terminator) is ignored.
    Raises :class:`DataError` on a missing file or an undecodable byte, naming
    the byte offset of the first bad byte.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: invalid UTF-8 at byte offset {e.start}") from None
    if text.startswith("\ufeff"):
        text = text[1:]
    parts = text.split("\n")
    if parts and parts[-1] == "":
        parts.pop()
    LOGGER.debug("loaded %d lines from %s", len(parts), path)
    return SentenceList(parts, str(path))


def write_lines(path: PathLike, lines: Iterable[str]) -> None:
    """Write one sentence per line, always terminating the final line."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            if any(b in line for b in _LINE_BREAKS):
                raise DataError(f"refusing to write a line containing a line break: {line!r}")
            f.write(line)
            f.write("\n")


@dataclass(frozen=True)
class ParallelCorpus:
    """Index-aligned source/reference sentences plus optional derived lists.

    ``perturbed_source`` is x_delta; ``hyp_original`` and ``hyp_perturbed``
    are the system outputs for x and x_delta.
    """

    source: SentenceList
    reference: SentenceList
    perturbed_source: Optional[SentenceList] = None
    hyp_original: Optional[SentenceList] = None
    hyp_perturbed: Optional[SentenceList] = None

    def __post_init__(self):
        n = len(self.source)
        if n == 0:
            raise DataError("empty corpus: at least one sentence pair is required")
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if value is not None and len(value) != n:
                raise DataError(
                    f"length mismatch: source has {n} lines, {field.name} has {len(value)}"
                )

    def __len__(self) -> int:
        return len(self.source)

    def replace(self, **changes: Optional[SentenceList]) -> "ParallelCorpus":
        return dataclasses.replace(self, **changes)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise DataError(f"corpus is missing required lists: {', '.join(missing)}")


def align(source: SentenceList, reference: SentenceList) -> ParallelCorpus:
    if len(source) != len(reference):
        raise DataError(
            f"length mismatch: source has {len(source)} lines, reference has {len(reference)}"
        )
    return ParallelCorpus(source=source, reference=reference)
