"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 translator failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bleu import BleuConfig, corpus_bleu
from .corpus_io import load_lines, write_lines
from .errors import DataError, TranslatorError, UndefinedMetricError
from .perturbation import Kind, LanguageMode, PerturbationSpec, perturb
from .pipeline import (
    CASE_CHANGING_GRID,
    MISSPELLING_GRID,
    EvaluateConfig,
    SweepConfig,
    dumps,
    read_correlation_rows,
    run_correlate,
    run_evaluate,
    run_sweep,
    sweep_tsv,
)
from .robustness import DEFAULT_BOOTSTRAP_SAMPLES
from .subword import (
    UnigramTrainerConfig,
    bpe_train,
    load_model,
    save_model,
    segment_corpus,
    unigram_train,
    word_frequencies,
)
from .subword.corpus import Mode
from .translator import DEFAULT_TIMEOUT, TranslatorSpec

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRANSLATOR = 0, 1, 2, 3

KIND_NAMES = {"misspell": Kind.MISSPELLING, "case": Kind.CASE_CHANGING}
LANG_NAMES = {"default": LanguageMode.DEFAULT, "ja": LanguageMode.JAPANESE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("probability must lie in [0, 1]")
    return value


def _grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="master seed (default: 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for bootstrap resampling")
    common.add_argument("--out-dir", default=None, help="directory for reports and intermediate files")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="mtrobust", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("perturb", parents=[common], help="apply synthetic noise to a text file")
    p.add_argument("--kind", choices=sorted(KIND_NAMES), required=True)
    p.add_argument("--prob", type=_probability, required=True)
    p.add_argument("--lang", choices=sorted(LANG_NAMES), default="default")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None, help="TSV of applied edits")

    p = sub.add_parser("score", parents=[common], help="corpus BLEU of a hypothesis file")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--lc", dest="lowercase", action="store_true", default=True)
    p.add_argument("--no-lc", dest="lowercase", action="store_false")
    p.add_argument("--tok", choices=["13a", "char"], default="13a")

    p = sub.add_parser("evaluate", parents=[common], help="ROBUST and CONSIS for one perturbation")
    p.add_argument("--src", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp-orig", default=None)
    p.add_argument("--hyp-pert", default=None)
    p.add_argument("--translator", default=None, help='"cmd:<command>" | "stub:identity" | "stub:degrading,s=<x>,seed=<n>"')
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="misspell")
    p.add_argument("--prob", type=_probability, default=0.1)
    p.add_argument("--lang", choices=sorted(LANG_NAMES), default="default", help="source language mode")
    p.add_argument("--target-lang", choices=["default", "ja"], default="default", help="ja scores on characters")
    p.add_argument("--bootstrap", type=int, nargs="?", const=DEFAULT_BOOTSTRAP_SAMPLES, default=None, metavar="B")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)

    p = sub.add_parser("sweep", parents=[common], help="evaluate over a grid of noise levels")
    p.add_argument("--src", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--translator", required=True)
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="misspell")
    p.add_argument("--grid", type=_grid, default=None, help="comma-separated probabilities")
    p.add_argument("--lang", choices=sorted(LANG_NAMES), default="default")
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--bootstrap", type=int, nargs="?", const=DEFAULT_BOOTSTRAP_SAMPLES, default=None, metavar="B")
    p.add_argument("--group", default=None, help="label for the group column (default: translator)")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)

    p = sub.add_parser("correlate", parents=[common], help="Pearson r(ROBUST, CONSIS) per group")
    p.add_argument("tsv", nargs="+", help="TSV file(s) with robust and consis columns")

    p = sub.add_parser("train-subword", parents=[common], help="learn a BPE or unigram model")
    p.add_argument("--model-type", choices=["bpe", "unigram"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--merges", type=int, default=1000, help="BPE merge operations")
    p.add_argument("--vocab-size", type=int, default=1000, help="unigram target vocabulary size")
    p.add_argument("--max-piece-len", type=int, default=8)
    p.add_argument("--marker", default="@@")

    p = sub.add_parser("segment", parents=[common], help="segment a text file into subwords")
    p.add_argument("--model-type", choices=["bpe", "unigram"], required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dropout", type=_probability, default=0.0, help="BPE-dropout probability")
    p.add_argument("--alpha", type=float, default=None, help="unigram sampling smoothing; enables sampling")
    p.add_argument("--marker", default=None)
    return parser


def _emit(text: str, out_dir: Optional[str], name: str) -> None:
    sys.stdout.write(text)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / name).write_text(text, encoding="utf-8")


def cmd_perturb(args) -> int:
    spec = PerturbationSpec(KIND_NAMES[args.kind], args.prob, LANG_NAMES[args.lang], args.seed)
    out, log = perturb(load_lines(args.input), spec)
    write_lines(args.out, out)
    if args.log:
        log.write_tsv(args.log)
    logging.info("perturbed %d/%d units in %d sentences", len(log), log.n_units, len(out))
    return EXIT_OK


def cmd_score(args) -> int:
    config = BleuConfig(lowercase=args.lowercase, tokenizer=args.tok)
    score = corpus_bleu(load_lines(args.hyp), load_lines(args.ref), config).to_dict()
    _emit(dumps(score), args.out_dir, "score.json")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.lang == "ja" and args.kind != "misspell":
        raise UsageError("--lang ja only supports --kind misspell")
    translator = TranslatorSpec.parse(args.translator, args.timeout) if args.translator else None
    if translator is None and not (args.hyp_orig and args.hyp_pert):
        raise UsageError("give --translator, or both --hyp-orig and --hyp-pert")
    config = EvaluateConfig(
        src=args.src,
        ref=args.ref,
        spec=PerturbationSpec(KIND_NAMES[args.kind], args.prob, LANG_NAMES[args.lang], args.seed),
        translator=translator,
        hyp_orig=args.hyp_orig,
        hyp_pert=args.hyp_pert,
        bootstrap=args.bootstrap,
        seed=args.seed,
        jobs=args.jobs,
        out_dir=args.out_dir,
        target_language=args.target_lang,
    )
    report = run_evaluate(config)
    sys.stdout.write(dumps(report.to_dict()))
    return EXIT_OK


def cmd_sweep(args) -> int:
    kind = KIND_NAMES[args.kind]
    grid = args.grid or (MISSPELLING_GRID if kind is Kind.MISSPELLING else CASE_CHANGING_GRID)
    try:
        config = SweepConfig(
            src=args.src,
            ref=args.ref,
            kind=kind,
            grid=grid,
            translator=TranslatorSpec.parse(args.translator, args.timeout),
            seed=args.seed,
            bootstrap=args.bootstrap,
            replicates=args.replicates,
            language_mode=args.lang,
            jobs=args.jobs,
            out_dir=args.out_dir,
            group=args.group,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    rows = run_sweep(config)
    sys.stdout.write(sweep_tsv(rows))
    return EXIT_OK


def cmd_correlate(args) -> int:
    rows = [row for path in args.tsv for row in read_correlation_rows(path)]
    result = run_correlate(rows)
    _emit(dumps(result.to_dict()), args.out_dir, "correlation.json")
    return EXIT_OK


def cmd_train_subword(args) -> int:
    freqs = word_frequencies(load_lines(args.input))
    if not freqs:
        raise DataError(f"{args.input}: no words to train on")
    if args.model_type == "bpe":
        model = bpe_train(freqs, args.merges, args.marker)
    else:
        model = unigram_train(freqs, args.vocab_size, UnigramTrainerConfig(seed_max_piece_len=args.max_piece_len))
    save_model(args.model, model)
    return EXIT_OK


def cmd_segment(args) -> int:
    model = load_model(args.model, args.model_type)
    if args.model_type == "bpe":
        mode = Mode.SAMPLE if args.dropout > 0 else Mode.DETERMINISTIC
        param = args.dropout
    else:
        mode = Mode.SAMPLE if args.alpha is not None else Mode.DETERMINISTIC
        param = args.alpha
    out = segment_corpus(load_lines(args.input), model, mode, param, args.seed, args.marker)
    write_lines(args.out, out)
    return EXIT_OK


COMMANDS = {
    "perturb": cmd_perturb,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "correlate": cmd_correlate,
    "train-subword": cmd_train_subword,
    "segment": cmd_segment,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"mtrobust: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TranslatorError as e:
        print(f"mtrobust: translator failure: {e}", file=sys.stderr)
        return EXIT_TRANSLATOR
    except (DataError, UndefinedMetricError) as e:
        print(f"mtrobust: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
