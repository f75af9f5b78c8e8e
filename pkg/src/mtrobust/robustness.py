"""ROBUST and CONSIS, paired bootstrap estimates, and Pearson correlation.

ROBUST is the ratio TQ(perturbed output, ref) / TQ(original output, ref) and
CONSIS the harmonic mean of the two directed BLEU scores between the original
and perturbed outputs. Both are reported on a 0-100 scale.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .bleu import BleuConfig, BleuScore, bleu_from_stats, corpus_bleu, corpus_stats
from .corpus_io import ParallelCorpus
from .errors import DataError, UndefinedMetricError
from .perturbation import PerturbationSpec

DEFAULT_BOOTSTRAP_SAMPLES = 1000

#: BLEU settings for the output-vs-output comparison behind CONSIS. Pass
#: ``BleuConfig(smoothing="epsilon")`` instead to keep it non-zero on tiny corpora.
CONSIS_BLEU = BleuConfig()


def robust_score(tq_perturbed: float, tq_original: float) -> float:
    """TQ(perturbed) / TQ(original) as a plain ratio; 1 means unaffected by noise."""
    if tq_perturbed < 0 or tq_original < 0:
        raise ValueError("translation quality scores must be non-negative")
    if tq_original == 0:
        raise UndefinedMetricError("ROBUST is undefined when TQ(original) = 0")
    return tq_perturbed / tq_original


def harmonic_mean(a: float, b: float) -> float:
    if a == b:
        return float(a)
    if a + b == 0:
        return 0.0
    # (a * b) first keeps the result bit-identical under argument swap; the clamp
    # stops rounding from pushing it outside [min, max]
    return min(max(2.0 * (a * b) / (a + b), min(a, b)), max(a, b))


def consis_score(
    hyp_original: Sequence[str], hyp_perturbed: Sequence[str], config: BleuConfig = CONSIS_BLEU
) -> float:
    """Symmetric similarity of two output sets: harmonic mean of BLEU in both directions."""
    if len(hyp_original) != len(hyp_perturbed):
        raise DataError(
            f"length mismatch: {len(hyp_original)} original vs {len(hyp_perturbed)} perturbed outputs"
        )
    a = corpus_bleu(hyp_perturbed, hyp_original, config).score
    b = corpus_bleu(hyp_original, hyp_perturbed, config).score
    return harmonic_mean(a, b)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError("pearson needs two 1-d sequences of equal length")
    if len(x) < 2:
        raise DataError("pearson needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DataError("pearson is undefined for a constant sequence (zero variance)")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


# --- metric descriptors for resampling -------------------------------------------

IndexMetric = Callable[[np.ndarray], float]


class Metric(Protocol):
    """Something the bootstrap can evaluate on a resampled index multiset.

    ``bind`` does the per-sentence work once; the returned function maps an
    array of sentence indices to the metric value on that resample.
    """

    name: str

    def bind(self, corpus: ParallelCorpus) -> IndexMetric: ...


@dataclass(frozen=True)
class TranslationQuality:
    """Corpus BLEU of ``hyp_field`` against the references."""

    hyp_field: str = "hyp_original"
    config: BleuConfig = BleuConfig()

    @property
    def name(self) -> str:
        return f"tq[{self.hyp_field}]"

    def bind(self, corpus: ParallelCorpus) -> IndexMetric:
        corpus.require(self.hyp_field, "reference")
        stats = corpus_stats(getattr(corpus, self.hyp_field), corpus.reference, self.config)
        config = self.config
        return lambda idx: bleu_from_stats(stats[idx].sum(axis=0), config).score


@dataclass(frozen=True)
class Robustness:
    """ROBUST in percent; numerator and denominator see the same resample."""

    config: BleuConfig = BleuConfig()
    numerator: Optional[Metric] = None
    denominator: Optional[Metric] = None
    name: str = "robust"

    def bind(self, corpus: ParallelCorpus) -> IndexMetric:
        num = (self.numerator or TranslationQuality("hyp_perturbed", self.config)).bind(corpus)
        den = (self.denominator or TranslationQuality("hyp_original", self.config)).bind(corpus)

        def value(idx: np.ndarray) -> float:
            return 100.0 * robust_score(num(idx), den(idx))

        return value


@dataclass(frozen=True)
class Consistency:
    config: BleuConfig = CONSIS_BLEU
    name: str = "consis"

    def bind(self, corpus: ParallelCorpus) -> IndexMetric:
        corpus.require("hyp_original", "hyp_perturbed")
        forward = corpus_stats(corpus.hyp_perturbed, corpus.hyp_original, self.config)
        backward = corpus_stats(corpus.hyp_original, corpus.hyp_perturbed, self.config)
        config = self.config

        def value(idx: np.ndarray) -> float:
            a = bleu_from_stats(forward[idx].sum(axis=0), config).score
            b = bleu_from_stats(backward[idx].sum(axis=0), config).score
            return harmonic_mean(a, b)

        return value


@dataclass(frozen=True)
class BootstrapResult:
    mean: float
    std: float
    B: int
    seed: int
    redraws: int = 0
    values: np.ndarray = field(default=None, repr=False, compare=False)


def bootstrap(
    corpus: ParallelCorpus, metric: Metric, B: int = DEFAULT_BOOTSTRAP_SAMPLES, seed: int = 0, jobs: int = 1
) -> BootstrapResult:
    """Paired bootstrap: mean and sample std (ddof=1) of ``metric`` over B resamples.

    Index sets come from one seeded generator in a fixed order, so the result
    does not depend on ``jobs``. A resample on which the metric is undefined is
    replaced by the next draw; more than 10*B replacements is an error.
    """
    if B < 2:
        raise ValueError("bootstrap needs B >= 2")
    fn = metric.bind(corpus)
    n = len(corpus)
    rng = np.random.default_rng(seed)
    values: list[float] = []
    redraws = 0
    executor = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None

    def safe(idx: np.ndarray) -> Optional[float]:
        try:
            return fn(idx)
        except UndefinedMetricError:
            return None

    try:
        while len(values) < B:
            batch = rng.integers(0, n, size=(B - len(values), n))
            results = executor.map(safe, batch) if executor else map(safe, batch)
            for v in results:
                if v is None:
                    redraws += 1
                else:
                    values.append(v)
            if redraws > 10 * B:
                raise UndefinedMetricError(
                    f"{metric.name} undefined on {redraws} resamples (limit {10 * B})"
                )
    finally:
        if executor:
            executor.shutdown()

    arr = np.asarray(values, dtype=float)
    if np.all(arr == arr[0]):
        mean, std = float(arr[0]), 0.0
    else:
        mean, std = float(arr.mean()), float(arr.std(ddof=1))
    return BootstrapResult(mean, std, B, seed, redraws, arr)


# --- report ----------------------------------------------------------------------


@dataclass
class RobustnessReport:
    tq_original: BleuScore
    tq_perturbed: BleuScore
    robust: Optional[float]  # percent; None when TQ(original) = 0
    consis: float
    bootstrap: Optional[dict] = None
    spec: Optional[PerturbationSpec] = None

    def to_dict(self) -> dict:
        return {
            "tq_original": self.tq_original.to_dict(),
            "tq_perturbed": self.tq_perturbed.to_dict(),
            "robust": self.robust,
            "consis": self.consis,
            "bootstrap": self.bootstrap,
            "spec": self.spec.to_dict() if self.spec else None,
        }

    def to_text(self) -> str:
        def fmt(value: Optional[float], key: str) -> str:
            if value is None:
                return f"{'undefined':>10}"
            text = f"{value:10.2f}"
            if self.bootstrap and self.bootstrap.get(f"{key}_mean") is not None:
                text += f"  {self.bootstrap[f'{key}_mean']:7.2f} ± {self.bootstrap[f'{key}_std']:.2f}"
            return text

        rows = [
            ("BLEU original", fmt(self.tq_original.score, "tq_orig")),
            ("BLEU perturbed", fmt(self.tq_perturbed.score, "tq_pert")),
            ("ROBUST (%)", fmt(self.robust, "robust")),
            ("CONSIS", fmt(self.consis, "consis")),
        ]
        header = f"{'metric':<16}{'point':>10}"
        if self.bootstrap:
            header += f"  bootstrap mean ± std (B={self.bootstrap['B']}, seed={self.bootstrap['seed']})"
        return "\n".join([header] + [f"{name:<16}{value}" for name, value in rows]) + "\n"


def evaluate_corpus(
    corpus: ParallelCorpus,
    config: BleuConfig = BleuConfig(),
    consis_config: BleuConfig = CONSIS_BLEU,
    B: Optional[int] = None,
    seed: int = 0,
    jobs: int = 1,
    spec: Optional[PerturbationSpec] = None,
) -> RobustnessReport:
    """Point estimates of TQ, ROBUST and CONSIS, plus bootstrap statistics when ``B`` is set."""
    corpus.require("reference", "hyp_original", "hyp_perturbed")
    tq_orig = corpus_bleu(corpus.hyp_original, corpus.reference, config)
    tq_pert = corpus_bleu(corpus.hyp_perturbed, corpus.reference, config)
    robust = 100.0 * robust_score(tq_pert.score, tq_orig.score) if tq_orig.score > 0 else None
    consis = consis_score(corpus.hyp_original, corpus.hyp_perturbed, consis_config)

    boot = None
    if B:
        boot = {"B": B, "seed": seed}
        metrics = {
            "tq_orig": TranslationQuality("hyp_original", config),
            "tq_pert": TranslationQuality("hyp_perturbed", config),
            "robust": Robustness(config),
            "consis": Consistency(consis_config),
        }
        for key, metric in metrics.items():
            if key == "robust" and robust is None:
                boot["robust_mean"] = boot["robust_std"] = None
                continue
            result = bootstrap(corpus, metric, B, seed, jobs)
            boot[f"{key}_mean"] = result.mean
            boot[f"{key}_std"] = result.std
    return RobustnessReport(tq_orig, tq_pert, robust, consis, boot, spec)
