"""Seed derivation for reproducible, scheduling-independent random streams."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mix_seed(*keys: int) -> int:
    """Hash a tuple of non-negative integers into one 64-bit seed."""
    words = np.random.SeedSequence([k & _MASK64 for k in keys]).generate_state(2, np.uint32)
    return (int(words[0]) << 32) | int(words[1])


def stream(*keys: int) -> np.random.Generator:
    """Independent generator keyed by e.g. ``(master_seed, sentence_index)``."""
    return np.random.default_rng(np.random.SeedSequence([k & _MASK64 for k in keys]))
