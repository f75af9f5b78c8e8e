#!/usr/bin/env python3
"""Regenerate tests/fixtures/tok13a_golden.json and bleu_golden.json from sacrebleu.

Needs ``pip install sacrebleu``; the package itself never imports it. The
outputs are frozen into the repo, so this only has to run when the input list
changes.
"""

from __future__ import annotations

import json
from pathlib import Path

import sacrebleu
from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

INPUTS = [
    "",
    " ",
    "Hello, world!",
    "3.5 pigs",
    "It certainly seems very likely.",
    "It will probably darken quite probably.",
    "Se kyllä tuntuu sangen luultavalta.",
    "Se kyllä tumtuu sangen luultavalta.",
    "The price rose 1,000.50 dollars in 2019.",
    "Year 2019.",
    "End with digit 5.",
    "a.b,c",
    "1.a a.1 1,a a,1",
    "U.S.A. is big.",
    "e-mail re-entry 10-20 x-5 5-x",
    "He said &quot;no&quot; &amp; left.",
    "&lt;tag&gt; &amp;amp;",
    "AT&T and R&D",
    "Tom's dog isn't here.",
    "(parentheses) [brackets] {braces}",
    "path/to/file.txt",
    "http://www.example.com/index.html?q=1&r=2",
    "user@example.com",
    "50% off! $20 only #deal",
    "a+b=c; d*e<f>g",
    "Wait... what?!",
    "~tilde ^caret `backtick` |pipe| \\backslash",
    "“Smart quotes” and ‘single’ — dash – en",
    "¿Qué tal? ¡Muy bien!",
    "Das Mädchen läuft schnell, nicht wahr?",
    "Ça coûte 3,50 € — n'est-ce pas ?",
    "猫が好きです。",
    "東京は大きい、そして美しい。",
    "Привет, мир!",
    "مرحبا بالعالم.",
    "tab\tseparated\twords",
    "multiple   spaces    here",
    "  leading and trailing  ",
    "<skipped> segment",
    "hyphen-\nated line",
    "new\nline",
    "1.5.2019 12:30",
    "-5 degrees, -3.2 more",
    ".leading period",
    "trailing comma,",
    ",,,...",
    "..",
    "a..b",
    "3..4",
    "x,y.z",
    "Mr. Smith vs. Mrs. Jones",
    "C++ and C# are languages",
    "emoji 😀 test 👍🏽!",
    "10°C or 50°F",
    "«guillemets» and ‹single›",
    "A_B_C under_score",
    "fi ﬁ ligature",
    "1-2-3-4",
    "a-1 1-a",
    "No punctuation at all",
    "UPPER CASE SENTENCE.",
    "Title Case Sentence Here",
    "'quoted' \"double\"",
    "3,000,000 people.",
    "π ≈ 3.14159",
]

BLEU_CASES = [
    (["the cat sat on the mat"], ["the cat is on the mat"]),
    (["The Cat sat on the mat.", "It is raining."], ["the cat is on the mat.", "It rains today."]),
    (
        ["It will probably darken quite probably.", "Se kyllä tuntuu."],
        ["It certainly seems probable.", "se kyllä tuntuu."],
    ),
    (
        [
            "this is a rather long hypothesis sentence with many words in it",
            "short one",
            "another test sentence, with punctuation!",
        ],
        [
            "this is a long hypothesis sentence with several words in it",
            "a short one here",
            "Another test sentence with punctuation.",
        ],
    ),
    (["a b c d e f g"], ["a b c d e f g h i j"]),
]


def main() -> None:
    tok = Tokenizer13a()
    tokens = [{"input": s, "output": tok(s)} for s in INPUTS]
    (FIXTURES / "tok13a_golden.json").write_text(
        json.dumps(tokens, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
    bleu = []
    for hyps, refs in BLEU_CASES:
        b = sacrebleu.corpus_bleu(hyps, [refs], lowercase=True, tokenize="13a", smooth_method="none")
        bleu.append(
            {
                "hyps": hyps,
                "refs": refs,
                "score": b.score,
                "counts": list(b.counts),
                "totals": list(b.totals),
                "bp": b.bp,
                "sys_len": b.sys_len,
                "ref_len": b.ref_len,
            }
        )
    (FIXTURES / "bleu_golden.json").write_text(
        json.dumps(bleu, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
    print(f"sacrebleu {sacrebleu.__version__}: {len(tokens)} tokenizer cases, {len(bleu)} BLEU cases")


if __name__ == "__main__":
    main()
