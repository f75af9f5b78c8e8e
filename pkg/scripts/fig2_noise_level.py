#!/usr/bin/env python3
"""Robustness against noise level for a fragile and a sturdier stub translator.

Both stubs are swept over the same grid with several perturbation replicates
per level. The script writes mean and standard deviation of ROBUST per level
as a TSV plus a plot-ready JSON series.

    python scripts/fig2_noise_level.py --out-dir runs/fig2
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from mtrobust.corpus_io import write_lines
from mtrobust.perturbation import Kind
from mtrobust.pipeline import SweepConfig, dumps, run_sweep
from mtrobust.synthetic import make_corpus
from mtrobust.translator import TranslatorSpec


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--src", help="source file; a synthetic corpus is generated when omitted")
    parser.add_argument("--ref", help="reference file, required with --src")
    parser.add_argument("--sentences", type=int, default=500, help="size of the synthetic corpus")
    parser.add_argument("--sensitivities", type=parse_floats, default=[0.5, 1.0])
    parser.add_argument("--grid", type=parse_floats, default=[0.05, 0.1, 0.15, 0.2])
    parser.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.MISSPELLING.value)
    parser.add_argument("--replicates", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="runs/fig2")
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

    series = []
    lines = ["system\tnoise_level\trobust_mean\trobust_std\tconsis_mean\tn"]
    for s in args.sensitivities:
        name = f"stub s={s:g}"
        config = SweepConfig(
            args.src, args.ref, Kind(args.kind), args.grid,
            TranslatorSpec.parse(f"stub:degrading,s={s},seed={args.seed}"),
            seed=args.seed, replicates=args.replicates, group=name,
        )
        rows = run_sweep(config)
        entry = {"system": name, "noise_level": args.grid, "robust_mean": [], "robust_std": [], "consis_mean": []}
        for level in args.grid:
            robust = np.array([r.report.robust for r in rows if r.noise_level == level and r.report.robust is not None])
            consis = np.array([r.report.consis for r in rows if r.noise_level == level])
            mean, std = float(robust.mean()), float(robust.std(ddof=1)) if len(robust) > 1 else 0.0
            entry["robust_mean"].append(mean)
            entry["robust_std"].append(std)
            entry["consis_mean"].append(float(consis.mean()))
            lines.append(f"{name}\t{level!r}\t{mean!r}\t{std!r}\t{entry['consis_mean'][-1]!r}\t{len(robust)}")
        series.append(entry)
        print(name, " ".join(f"{p:g}:{m:.2f}" for p, m in zip(args.grid, entry["robust_mean"])))

    (out / "fig2_noise_level.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "fig2_series.json").write_text(dumps({"kind": args.kind, "series": series}), encoding="utf-8")


if __name__ == "__main__":
    main()
