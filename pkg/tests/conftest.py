import itertools
import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def levenshtein(a: str, b: str) -> int:
    """Reference edit distance, kept independent of the package's own copy."""
    d = [[i + j if i * j == 0 else 0 for j in range(len(b) + 1)] for i in range(len(a) + 1)]
    for i, j in itertools.product(range(1, len(a) + 1), range(1, len(b) + 1)):
        d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[len(a)][len(b)]


class ScriptedRng:
    """Replays fixed draws so a test can pick strategy, position and payload."""

    def __init__(self, integers=(), randoms=()):
        self._ints = list(integers)
        self._floats = list(randoms)

    def integers(self, high):
        value = self._ints.pop(0)
        assert 0 <= value < high, (value, high)
        return value

    def random(self):
        return self._floats.pop(0)


@pytest.fixture
def golden_13a():
    return json.loads((FIXTURES / "tok13a_golden.json").read_text(encoding="utf-8"))


@pytest.fixture
def golden_bleu():
    return json.loads((FIXTURES / "bleu_golden.json").read_text(encoding="utf-8"))
