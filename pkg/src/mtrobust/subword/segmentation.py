from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

DEFAULT_MARKER = "@@"


@dataclass(frozen=True)
class Segmentation:
    """Pieces of one word. Every piece but the last joins to the piece on its right.

    ``fallback`` is set when some character was outside the model's vocabulary.
    """

    pieces: tuple[str, ...]
    fallback: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if any(p == "" for p in self.pieces):
            raise ValueError("segmentation pieces must be non-empty")

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    @property
    def joins_right(self) -> tuple[bool, ...]:
        return tuple(i < len(self.pieces) - 1 for i in range(len(self.pieces)))

    def word(self) -> str:
        return "".join(self.pieces)

    def serialize(self, marker: str = DEFAULT_MARKER) -> list[str]:
        """Pieces as tokens, continuation marker appended to all but the last."""
        return [p + marker if j else p for p, j in zip(self.pieces, self.joins_right)]


def detokenize(tokens: Sequence[str] | str, marker: str = DEFAULT_MARKER) -> str:
    """Undo :meth:`Segmentation.serialize` on a space-joined line."""
    line = tokens if isinstance(tokens, str) else " ".join(tokens)
    return line.replace(marker + " ", "")
