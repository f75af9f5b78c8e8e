"""End-to-end experiment pipelines: evaluate one perturbation, sweep noise levels, correlate."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import shutil
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .bleu import BleuConfig
from .corpus_io import ParallelCorpus, PathLike, SentenceList, align, load_lines, write_lines
from .errors import DataError
from .perturbation import Kind, PerturbationLog, PerturbationSpec, perturb
from .robustness import RobustnessReport, evaluate_corpus, pearson
from .seeding import mix_seed
from .translator import TranslatorKind, TranslatorSpec, translate

LOGGER = logging.getLogger(__name__)

MISSPELLING_GRID = (0.05, 0.1, 0.15, 0.2)
CASE_CHANGING_GRID = (0.3, 0.5, 0.7, 0.9)


def dumps(obj) -> str:
    """Canonical JSON used for every report, so identical runs give identical bytes."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Staging:
    """Collect outputs in a private directory and publish them only on success."""

    def __init__(self, out_dir: Optional[PathLike]):
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.tmp: Optional[Path] = None

    def __enter__(self) -> "_Staging":
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            self.tmp = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out_dir))
        return self

    def path(self, name: str) -> Optional[Path]:
        return self.tmp / name if self.tmp else None

    def __exit__(self, exc_type, exc, tb):
        if self.tmp is None:
            return False
        try:
            if exc_type is None:
                for item in sorted(self.tmp.iterdir()):
                    os.replace(item, self.out_dir / item.name)
        finally:
            shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def _write_manifest(staging: _Staging, command: str, config: dict, seeds: dict) -> None:
    artifacts = {p.name: _sha256(p) for p in sorted(staging.tmp.iterdir())}
    manifest = {
        "tool": "mtrobust",
        "version": __version__,
        "command": command,
        "config": config,
        "seeds": seeds,
        "artifacts": artifacts,
    }
    staging.path("manifest.json").write_text(dumps(manifest), encoding="utf-8")


def _bleu_config(language: str) -> BleuConfig:
    # Japanese output is scored on characters (no external word segmenter)
    return BleuConfig(tokenizer="char") if language == "ja" else BleuConfig()


@dataclass
class EvaluateConfig:
    src: str
    ref: str
    spec: PerturbationSpec
    translator: Optional[TranslatorSpec] = None
    hyp_orig: Optional[str] = None
    hyp_pert: Optional[str] = None
    bootstrap: Optional[int] = None
    seed: int = 0
    jobs: int = 1
    out_dir: Optional[str] = None
    target_language: str = "default"

    def to_dict(self) -> dict:
        return {
            "src": self.src,
            "ref": self.ref,
            "perturbation": self.spec.to_dict(),
            "translator": self.translator.label() if self.translator else None,
            "hyp_orig": self.hyp_orig,
            "hyp_pert": self.hyp_pert,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "target_language": self.target_language,
        }


def perturb_and_translate(
    corpus: ParallelCorpus,
    spec: PerturbationSpec,
    translator: TranslatorSpec,
    hyp_original: Optional[SentenceList] = None,
) -> tuple[ParallelCorpus, PerturbationLog]:
    """Fill in x_delta, y' and y'_delta. ``hyp_original`` skips re-translating x."""
    if translator.kind is TranslatorKind.FILE:
        raise DataError("a file translator holds one hypothesis set; pass --hyp-orig/--hyp-pert instead")
    perturbed, log = perturb(corpus.source, spec)
    if hyp_original is None:
        hyp_original = translate(corpus.source, translator, clean=corpus.source)
    hyp_perturbed = translate(perturbed, translator, clean=corpus.source)
    filled = corpus.replace(
        perturbed_source=perturbed, hyp_original=hyp_original, hyp_perturbed=hyp_perturbed
    )
    return filled, log


def run_evaluate(config: EvaluateConfig) -> RobustnessReport:
    """Perturb, translate, score. With ``out_dir`` set, every intermediate file is kept.

    If hypothesis files are given the perturbation and translation steps are
    skipped and only scoring happens.
    """
    corpus = align(load_lines(config.src), load_lines(config.ref))
    bleu_config = _bleu_config(config.target_language)
    with _Staging(config.out_dir) as staging:
        log = None
        if config.hyp_orig or config.hyp_pert:
            if not (config.hyp_orig and config.hyp_pert):
                raise DataError("--hyp-orig and --hyp-pert must be given together")
            corpus = corpus.replace(
                hyp_original=load_lines(config.hyp_orig), hyp_perturbed=load_lines(config.hyp_pert)
            )
        else:
            if config.translator is None:
                raise DataError("either a translator or both hypothesis files are required")
            corpus, log = perturb_and_translate(corpus, config.spec, config.translator)
        report = evaluate_corpus(
            corpus,
            config=bleu_config,
            consis_config=bleu_config,
            B=config.bootstrap,
            seed=config.seed,
            jobs=config.jobs,
            spec=config.spec if log is not None else None,
        )
        if staging.tmp is not None:
            if log is not None:
                write_lines(staging.path("source.perturbed"), corpus.perturbed_source)
                log.write_tsv(staging.path("perturbation_log.tsv"))
            write_lines(staging.path("hyp.original"), corpus.hyp_original)
            write_lines(staging.path("hyp.perturbed"), corpus.hyp_perturbed)
            staging.path("report.json").write_text(dumps(report.to_dict()), encoding="utf-8")
            staging.path("report.txt").write_text(report.to_text(), encoding="utf-8")
            _write_manifest(
                staging,
                "evaluate",
                config.to_dict(),
                {"perturbation": config.spec.master_seed, "bootstrap": config.seed},
            )
    return report


@dataclass
class SweepConfig:
    src: str
    ref: str
    kind: Kind
    grid: Sequence[float]
    translator: TranslatorSpec
    seed: int = 0
    bootstrap: Optional[int] = None
    replicates: int = 1
    language_mode: str = "default"
    jobs: int = 1
    out_dir: Optional[str] = None
    group: Optional[str] = None

    def __post_init__(self):
        self.kind = Kind(self.kind)
        grid = [float(p) for p in self.grid]
        if not grid:
            raise ValueError("empty probability grid")
        if any(not 0.0 <= p <= 1.0 for p in grid):
            raise ValueError(f"grid values must lie in [0, 1]: {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"grid must be strictly increasing: {grid}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        self.grid = tuple(grid)

    @property
    def label(self) -> str:
        return self.group or self.translator.label()

    def to_dict(self) -> dict:
        return {
            "src": self.src,
            "ref": self.ref,
            "kind": self.kind.value,
            "grid": list(self.grid),
            "translator": self.translator.label(),
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "replicates": self.replicates,
            "language_mode": self.language_mode,
            "group": self.label,
        }


def level_seed(master_seed: int, level_index: int, replicate: int = 0) -> int:
    """Perturbation seed for one grid point; appending grid points leaves earlier ones unchanged."""
    if replicate == 0:
        return mix_seed(master_seed, level_index)
    return mix_seed(master_seed, level_index, replicate)


@dataclass
class SweepRow:
    group: str
    kind: str
    noise_level: float
    replicate: int
    seed: int
    report: RobustnessReport = field(repr=False)

    def values(self) -> list:
        r = self.report
        return [
            self.group,
            self.kind,
            self.noise_level,
            self.replicate,
            self.seed,
            r.tq_original.score,
            r.tq_perturbed.score,
            r.robust,
            r.consis,
        ]


SWEEP_COLUMNS = ["group", "kind", "noise_level", "replicate", "seed", "tq_orig", "tq_pert", "robust", "consis"]


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_tsv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    buf.write("\t".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        buf.write("\t".join(_fmt(v) for v in row.values()) + "\n")
    return buf.getvalue()


def sweep_series(rows: Sequence[SweepRow]) -> dict:
    """Per-level means across replicates, ready for a line plot of metric vs noise level."""
    by_level: dict[float, list[SweepRow]] = defaultdict(list)
    for row in rows:
        by_level[row.noise_level].append(row)
    levels = sorted(by_level)

    def mean(key):
        out = []
        for level in levels:
            vals = [getattr(r.report, key) for r in by_level[level]]
            vals = [v for v in vals if v is not None]
            out.append(float(np.mean(vals)) if vals else None)
        return out

    return {
        "group": rows[0].group if rows else None,
        "kind": rows[0].kind if rows else None,
        "noise_level": levels,
        "robust_mean": mean("robust"),
        "consis_mean": mean("consis"),
        "n_replicates": [len(by_level[level]) for level in levels],
    }


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """One report per (noise level, replicate); y' is translated once and reused."""
    corpus = align(load_lines(config.src), load_lines(config.ref))
    bleu_config = _bleu_config("ja" if config.language_mode in ("ja", "japanese") else "default")
    language_mode = "japanese" if config.language_mode in ("ja", "japanese") else "default"
    if config.translator.kind is TranslatorKind.FILE:
        raise DataError("sweeps need a live translator (cmd: or stub:)")
    hyp_original = translate(corpus.source, config.translator, clean=corpus.source)
    rows = []
    for k, level in enumerate(config.grid):
        for r in range(config.replicates):
            seed = level_seed(config.seed, k, r)
            spec = PerturbationSpec(config.kind, level, language_mode, seed)
            filled, _ = perturb_and_translate(corpus, spec, config.translator, hyp_original)
            report = evaluate_corpus(
                filled,
                config=bleu_config,
                consis_config=bleu_config,
                B=config.bootstrap,
                seed=seed,
                jobs=config.jobs,
                spec=spec,
            )
            LOGGER.info("level %g replicate %d: robust=%s consis=%.2f", level, r, report.robust, report.consis)
            rows.append(SweepRow(config.label, config.kind.value, level, r, seed, report))

    if config.out_dir is not None:
        with _Staging(config.out_dir) as staging:
            write_lines(staging.path("hyp.original"), hyp_original)
            staging.path("sweep.tsv").write_text(sweep_tsv(rows), encoding="utf-8")
            staging.path("sweep_series.json").write_text(dumps(sweep_series(rows)), encoding="utf-8")
            staging.path("reports.json").write_text(
                dumps([dict(zip(SWEEP_COLUMNS[:5], row.values()[:5]), report=row.report.to_dict()) for row in rows]),
                encoding="utf-8",
            )
            _write_manifest(
                staging,
                "sweep",
                config.to_dict(),
                {"master": config.seed, "levels": [row.seed for row in rows]},
            )
    return rows


@dataclass
class CorrelationResult:
    groups: dict[str, dict]
    scatter: dict[str, dict]

    def to_dict(self) -> dict:
        return {"groups": self.groups, "scatter": self.scatter}


def run_correlate(rows: Iterable[tuple[str, float, float]]) -> CorrelationResult:
    """Pearson r between ROBUST and CONSIS within each group.

    A group with fewer than two points or zero variance gets ``r = None`` and
    an ``error`` entry instead of failing the whole run.
    """
    points: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for group, robust, consis in rows:
        if robust is None or consis is None or np.isnan(robust) or np.isnan(consis):
            continue
        points[str(group)].append((float(robust), float(consis)))
    groups = {}
    scatter = {}
    for group in sorted(points):
        xs = [p[0] for p in points[group]]
        ys = [p[1] for p in points[group]]
        scatter[group] = {"robust": xs, "consis": ys}
        try:
            groups[group] = {"r": pearson(xs, ys), "n": len(xs)}
        except DataError as e:
            groups[group] = {"r": None, "n": len(xs), "error": str(e)}
    return CorrelationResult(groups, scatter)


def read_correlation_rows(path: PathLike) -> list[tuple[str, float, float]]:
    """Read a TSV with ``robust`` and ``consis`` columns and an optional ``group`` column."""
    with Path(path).open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f, delimiter="\t")
        fields = reader.fieldnames or []
        missing = {"robust", "consis"} - set(fields)
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        rows = []
        for n, row in enumerate(reader, 2):
            try:
                rows.append((row.get("group") or "all", float(row["robust"]), float(row["consis"])))
            except (TypeError, ValueError):
                raise DataError(f"{path}:{n}: non-numeric robust/consis value") from None
    return rows
