#!/usr/bin/env python3
"""Scatter of consistency against robustness for several stub translators.

Each stub sensitivity plays the role of one MT system. Every system is swept
over the same misspelling levels, and the (ROBUST, CONSIS) pairs are written
as a TSV scatter together with the per-system and pooled Pearson r.

    python scripts/fig1_correlation.py --out-dir runs/fig1
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from mtrobust.corpus_io import load_lines, write_lines
from mtrobust.perturbation import Kind
from mtrobust.pipeline import SweepConfig, dumps, run_correlate, run_sweep
from mtrobust.synthetic import make_corpus
from mtrobust.translator import TranslatorSpec


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--src", help="source file; a synthetic corpus is generated when omitted")
    parser.add_argument("--ref", help="reference file, required with --src")
    parser.add_argument("--sentences", type=int, default=500, help="size of the synthetic corpus")
    parser.add_argument("--sensitivities", type=parse_floats, default=[0.25, 0.5, 0.75, 1.0])
    parser.add_argument("--grid", type=parse_floats, default=[0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6])
    parser.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.MISSPELLING.value)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="runs/fig1")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.src is None:
        src, ref = make_corpus(args.sentences, seed=args.seed)
        args.src, args.ref = str(out / "src.txt"), str(out / "ref.txt")
        write_lines(args.src, src)
        write_lines(args.ref, ref)
    elif args.ref is None:
        parser.error("--ref is required with --src")
    n = len(load_lines(args.src))

    points = []
    lines = ["system\tnoise_level\trobust\tconsis"]
    for s in args.sensitivities:
        name = f"stub s={s:g}"
        config = SweepConfig(
            args.src, args.ref, Kind(args.kind), args.grid,
            TranslatorSpec.parse(f"stub:degrading,s={s},seed={args.seed}"),
            seed=args.seed, group=name,
        )
        for row in run_sweep(config):
            points.append((name, row.report.robust, row.report.consis))
            lines.append(f"{name}\t{row.noise_level!r}\t{row.report.robust!r}\t{row.report.consis!r}")

    per_system = run_correlate(points).to_dict()
    pooled = run_correlate([("all", r, c) for _, r, c in points]).groups["all"]
    result = {"n_sentences": n, "kind": args.kind, "grid": args.grid, "pooled": pooled, **per_system}
    (out / "fig1_scatter.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "fig1_correlation.json").write_text(dumps(result), encoding="utf-8")
    for name, entry in per_system["groups"].items():
        print(f"{name}: r = {entry['r']:.4f} over {entry['n']} levels")
    print(f"pooled: r = {pooled['r']:.4f}")
    print(json.dumps({"written": [str(out / "fig1_scatter.tsv"), str(out / "fig1_correlation.json")]}))


if __name__ == "__main__":
    main()
