from __future__ import annotations

import shlex
import sys

import numpy as np
import pytest

from mtrobust.corpus_io import write_lines
from mtrobust.errors import DataError, TranslatorError
from mtrobust.perturbation import Kind, PerturbationSpec, perturb
from mtrobust.seeding import stream
from mtrobust.synthetic import make_corpus
from mtrobust.translator import (
    StubConfig,
    StubName,
    TranslatorKind,
    TranslatorSpec,
    degrading_stub,
    perturbed_fraction,
    translate,
)

PY = shlex.quote(sys.executable)


def python_cmd(code: str, timeout: float = 30) -> TranslatorSpec:
    return TranslatorSpec.parse(f"cmd:{PY} -c {shlex.quote(code)}", timeout)


# spec parsing


@pytest.mark.parametrize(
    "text, kind",
    [
        ("cmd:marian-decoder -c model.yml", TranslatorKind.COMMAND),
        ("file:hyps.txt", TranslatorKind.FILE),
        ("stub:identity", TranslatorKind.STUB),
        ("stub:degrading,s=0.5,seed=7", TranslatorKind.STUB),
    ],
)
def test_parse_and_label(text, kind):
    spec = TranslatorSpec.parse(text)
    assert spec.kind is kind
    assert spec.label() == text


def test_parse_stub_options():
    spec = TranslatorSpec.parse("stub:degrading,s=0.25,seed=3")
    assert spec.stub_config == StubConfig(StubName.DEGRADING, 0.25, 3)


@pytest.mark.parametrize("text", ["identity", "stub:", "gpu:model", "stub:degrading,x=1", "stub:degrading,s=2", "stub:other"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        TranslatorSpec.parse(text)


def test_exactly_one_payload():
    with pytest.raises(ValueError):
        TranslatorSpec(TranslatorKind.COMMAND)
    with pytest.raises(ValueError):
        TranslatorSpec(TranslatorKind.FILE, command_line="x", hyp_path="y")


# stubs


def test_identity_stub():
    assert translate(["a b", "c"], TranslatorSpec.parse("stub:identity")) == ["a b", "c"]


def test_degrading_canonical_form():
    assert degrading_stub("The Cat sat", 0.0, stream(0)) == "sat cat the"


def test_sensitivity_zero_ignores_noise():
    src, _ = make_corpus(200, seed=1)
    pert, _ = perturb(src, PerturbationSpec(Kind.MISSPELLING, 0.3, master_seed=1))
    recased, _ = perturb(src, PerturbationSpec(Kind.CASE_CHANGING, 1.0, master_seed=1))
    stub = TranslatorSpec.parse("stub:degrading,s=0,seed=4")
    clean = translate(src, stub, src)
    assert translate(pert, stub, src) == clean
    assert translate(recased, stub, src) == clean
    # without the clean side case changes alone are still invisible
    assert translate(recased, stub) == translate(src, stub)


def test_fully_misspelled_sentence_fully_scrambled():
    clean = "abc defg hij"
    noisy = "xyz uvwq klm"
    out = degrading_stub(noisy, 1.0, stream(0), clean)
    assert out == "ijh efgd bca"
    assert all(w not in clean.split() for w in out.split())


def test_scramble_drops_words_that_cannot_change():
    # "aa" has no distinct rotation and is dropped; "ab" rotates to "ba"
    assert degrading_stub("bb cd", 1.0, stream(0), "aa ab") == "ba"


def test_word_count_mismatch_falls_back_to_own_words():
    assert degrading_stub("a b c", 1.0, stream(0), "a b") == "c b a"


def test_perturbed_fraction():
    assert perturbed_fraction("tumtuu", "tuntuu") == pytest.approx(1 / 6)
    assert perturbed_fraction("TUNTUU", "tuntuu") == 0.0
    assert perturbed_fraction("xyz", "abc") == 1.0
    assert perturbed_fraction("ab", "abcd") == 0.5


def test_stub_deterministic():
    src, _ = make_corpus(50, seed=2)
    pert, _ = perturb(src, PerturbationSpec(Kind.MISSPELLING, 0.5, master_seed=2))
    stub = TranslatorSpec.parse("stub:degrading,s=1,seed=9")
    assert translate(pert, stub, src) == translate(pert, stub, src)
    other = TranslatorSpec.parse("stub:degrading,s=1,seed=10")
    assert translate(pert, stub, src) != translate(pert, other, src)


def corruption_rate(sensitivity, clean, noisy):
    changed = total = 0
    for i, (c, n) in enumerate(zip(clean, noisy)):
        reference = degrading_stub(c, 0.0, stream(0)).split()
        out = degrading_stub(n, sensitivity, stream(123, i), c).split()
        total += len(reference)
        if len(out) != len(reference):  # a word was dropped; count the whole sentence
            changed += len(reference)
        else:
            changed += sum(a != b for a, b in zip(reference, out))
    return changed / total


def test_corruption_grows_with_sensitivity():
    src, _ = make_corpus(1000, seed=3)
    pert, _ = perturb(src, PerturbationSpec(Kind.MISSPELLING, 0.3, master_seed=3))
    rates = [corruption_rate(s, src, pert) for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert rates[0] == 0.0
    assert all(a < b for a, b in zip(rates, rates[1:]))


def test_expected_corruption_matches_construction():
    # each word is hit with probability sensitivity * fraction of changed characters
    clean = "abcdefgh " * 2000
    noisy = "abcdefgX " * 2000
    hits = degrading_stub(noisy.strip(), 0.8, np.random.default_rng(0), clean.strip()).split().count("bcdefgha")
    assert abs(hits / 2000 - 0.8 / 8) < 0.02


def test_sensitivity_validated():
    with pytest.raises(ValueError):
        degrading_stub("a", 1.5, stream(0))


def test_clean_side_length_checked():
    with pytest.raises(DataError):
        translate(["a", "b"], TranslatorSpec.parse("stub:degrading,s=1,seed=0"), ["a"])


# files


def test_file_mode(tmp_path):
    write_lines(tmp_path / "h.txt", ["x", "y"])
    assert translate(["a", "b"], TranslatorSpec.parse(f"file:{tmp_path / 'h.txt'}")) == ["x", "y"]


def test_file_mode_count_mismatch(tmp_path):
    write_lines(tmp_path / "h.txt", ["x", "y", "z"])
    with pytest.raises(DataError):
        translate(["a", "b"], TranslatorSpec.parse(f"file:{tmp_path / 'h.txt'}"))


# subprocess


def test_command_round_trip():
    spec = python_cmd("import sys\nfor l in sys.stdin: print(l.rstrip('\\n').upper())")
    assert translate(["a b", "", "ä"], spec) == ["A B", "", "Ä"]


def test_command_nonzero_exit():
    with pytest.raises(TranslatorError, match="code 4"):
        translate(["a"], python_cmd("import sys; sys.stderr.write('boom'); sys.exit(4)"))


def test_command_line_count_mismatch():
    with pytest.raises(TranslatorError, match="1 lines for 2"):
        translate(["a", "b"], python_cmd("print('only one')"))


def test_command_not_found():
    with pytest.raises(TranslatorError, match="not found"):
        translate(["a"], TranslatorSpec.parse("cmd:/nonexistent/translator-binary"))


def test_command_timeout():
    with pytest.raises(TranslatorError, match="timed out"):
        translate(["a"], python_cmd("import time; time.sleep(5)", timeout=0.5))


def test_command_invalid_utf8():
    with pytest.raises(TranslatorError, match="UTF-8"):
        translate(["a"], python_cmd("import sys; sys.stdout.buffer.write(b'\\xff\\n')"))
