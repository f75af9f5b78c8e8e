"""Robustness (ROBUST) and consistency (CONSIS) of translation systems under synthetic input noise."""

__version__ = "0.1.0"

from .bleu import BleuConfig, BleuScore, corpus_bleu, tokenize_13a, tokenize_character
from .corpus_io import ParallelCorpus, SentenceList, align, load_lines, write_lines
from .errors import DataError, TranslatorError, UndefinedMetricError
from .perturbation import (
    PerturbationLog,
    PerturbationSpec,
    misspell_word,
    perturb,
    perturb_casing,
    perturb_misspelling,
    qwerty_neighbors,
)
from .robustness import (
    RobustnessReport,
    bootstrap,
    consis_score,
    evaluate_corpus,
    pearson,
    robust_score,
)
from .translator import TranslatorSpec, degrading_stub, translate

__all__ = [
    "BleuConfig",
    "BleuScore",
    "DataError",
    "ParallelCorpus",
    "PerturbationLog",
    "PerturbationSpec",
    "RobustnessReport",
    "SentenceList",
    "TranslatorError",
    "TranslatorSpec",
    "UndefinedMetricError",
    "align",
    "bootstrap",
    "consis_score",
    "corpus_bleu",
    "degrading_stub",
    "evaluate_corpus",
    "load_lines",
    "misspell_word",
    "pearson",
    "perturb",
    "perturb_casing",
    "perturb_misspelling",
    "qwerty_neighbors",
    "robust_score",
    "tokenize_13a",
    "tokenize_character",
    "translate",
    "write_lines",
]
