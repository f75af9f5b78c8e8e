from __future__ import annotations

import hashlib
import json
import shlex
import sys

import numpy as np
import pytest

from mtrobust.bleu import corpus_bleu
from mtrobust.corpus_io import load_lines, write_lines
from mtrobust.errors import DataError, TranslatorError
from mtrobust.perturbation import Kind, PerturbationSpec
from mtrobust.pipeline import (
    SWEEP_COLUMNS,
    EvaluateConfig,
    SweepConfig,
    level_seed,
    read_correlation_rows,
    run_correlate,
    run_evaluate,
    run_sweep,
    sweep_tsv,
)
from mtrobust.robustness import harmonic_mean
from mtrobust.synthetic import make_corpus
from mtrobust.translator import TranslatorSpec

IDENTITY = TranslatorSpec.parse("stub:identity")


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    src, ref = make_corpus(300, seed=0)
    write_lines(root / "src.txt", src)
    write_lines(root / "ref.txt", ref)
    return {"src": str(root / "src.txt"), "ref": str(root / "ref.txt"), "root": root}


def evaluate(files, p, translator, seed=0, **kwargs):
    spec = PerturbationSpec(kwargs.pop("kind", Kind.MISSPELLING), p, master_seed=seed)
    return run_evaluate(EvaluateConfig(files["src"], files["ref"], spec, translator, seed=seed, **kwargs))


# evaluate


def test_nothing_perturbed_is_fully_robust(files):
    report = run_evaluate(
        EvaluateConfig(files["src"], files["src"], PerturbationSpec(Kind.MISSPELLING, 0.0), IDENTITY)
    )
    assert report.robust == 100.0
    assert report.consis == 100.0


def test_identity_translator_consistency_is_source_similarity(files):
    report = evaluate(files, 0.1, IDENTITY, seed=3, out_dir=str(files["root"] / "identity"))
    src = load_lines(files["src"])
    pert = load_lines(files["root"] / "identity" / "source.perturbed")
    expected = harmonic_mean(corpus_bleu(pert, src).score, corpus_bleu(src, pert).score)
    assert report.consis < 100
    assert report.consis == expected


def test_more_noise_lowers_robustness_on_average(files):
    stub = TranslatorSpec.parse("stub:degrading,s=0.5,seed=1")
    low = [evaluate(files, 0.1, stub, seed=s).robust for s in range(10)]
    high = [evaluate(files, 0.2, stub, seed=s).robust for s in range(10)]
    assert np.mean(high) <= np.mean(low)


def test_outputs_and_manifest(files, tmp_path):
    out = tmp_path / "run"
    stub = TranslatorSpec.parse("stub:degrading,s=1,seed=2")
    evaluate(files, 0.1, stub, seed=5, out_dir=str(out), bootstrap=20)
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "hyp.original",
        "hyp.perturbed",
        "manifest.json",
        "perturbation_log.tsv",
        "report.json",
        "report.txt",
        "source.perturbed",
    ]
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["seeds"] == {"perturbation": 5, "bootstrap": 5}
    assert manifest["config"]["translator"] == "stub:degrading,s=1,seed=2"
    for name, digest in manifest["artifacts"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["bootstrap"]["B"] == 20


def test_repeat_runs_are_byte_identical(files, tmp_path):
    stub = TranslatorSpec.parse("stub:degrading,s=0.5,seed=2")
    for name in ("a", "b"):
        evaluate(files, 0.15, stub, seed=9, out_dir=str(tmp_path / name), bootstrap=50, jobs=2)
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name


def test_failure_leaves_no_partial_outputs(files, tmp_path):
    out = tmp_path / "failed"
    failing = TranslatorSpec.parse(f"cmd:{shlex.quote(sys.executable)} -c 'import sys; sys.exit(1)'")
    with pytest.raises(TranslatorError):
        evaluate(files, 0.1, failing, out_dir=str(out))
    assert list(out.iterdir()) == []


def test_existing_outputs_untouched_on_failure(files, tmp_path):
    out = tmp_path / "keep"
    evaluate(files, 0.1, IDENTITY, out_dir=str(out))
    before = {p.name: p.read_bytes() for p in out.iterdir()}
    bad_ref = tmp_path / "short.txt"
    write_lines(bad_ref, ["only one line"])
    with pytest.raises(DataError):
        run_evaluate(EvaluateConfig(files["src"], str(bad_ref), PerturbationSpec(Kind.MISSPELLING, 0.1), IDENTITY, out_dir=str(out)))
    assert {p.name: p.read_bytes() for p in out.iterdir()} == before


def test_precomputed_hypotheses(files, tmp_path):
    hyp = load_lines(files["ref"])
    write_lines(tmp_path / "h1", hyp)
    write_lines(tmp_path / "h2", hyp)
    report = run_evaluate(
        EvaluateConfig(files["src"], files["ref"], PerturbationSpec(Kind.MISSPELLING, 0.1), hyp_orig=str(tmp_path / "h1"), hyp_pert=str(tmp_path / "h2"))
    )
    assert report.tq_original.score == 100.0
    assert report.robust == 100.0 and report.spec is None


def test_japanese_target_scores_characters(tmp_path):
    write_lines(tmp_path / "src", ["hello world", "good day"])
    write_lines(tmp_path / "ref", ["こんにちは世界", "良い日"])
    write_lines(tmp_path / "h1", ["こんにちは世界", "良い日"])
    write_lines(tmp_path / "h2", ["こんにちは世", "良い日"])
    config = EvaluateConfig(
        str(tmp_path / "src"), str(tmp_path / "ref"), PerturbationSpec(Kind.MISSPELLING, 0.1),
        hyp_orig=str(tmp_path / "h1"), hyp_pert=str(tmp_path / "h2"), target_language="ja",
    )
    report = run_evaluate(config)
    assert report.tq_original.hyp_length == 10
    assert 0 < report.robust < 100


# sweep


def sweep(files, grid, translator, **kwargs):
    return run_sweep(SweepConfig(files["src"], files["ref"], kwargs.pop("kind", Kind.MISSPELLING), grid, translator, **kwargs))


def test_zero_grid(files):
    rows = sweep(files, [0.0], TranslatorSpec.parse("stub:degrading,s=1,seed=0"))
    assert len(rows) == 1 and rows[0].report.robust == 100.0


def test_small_grid_is_monotone(files):
    rows = sweep(files, [0.05, 0.1, 0.15, 0.2], TranslatorSpec.parse("stub:degrading,s=1,seed=0"), seed=1)
    robust = [r.report.robust for r in rows]
    assert len(rows) == 4
    assert all(b <= a for a, b in zip(robust, robust[1:]))


def test_sweep_files_are_deterministic(files, tmp_path):
    stub = TranslatorSpec.parse("stub:degrading,s=0.5,seed=0")
    for name in ("a", "b"):
        sweep(files, [0.1, 0.2], stub, replicates=2, out_dir=str(tmp_path / name), bootstrap=10)
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name
    lines = (tmp_path / "a" / "sweep.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[0].split("\t") == SWEEP_COLUMNS
    assert len(lines) == 5
    series = json.loads((tmp_path / "a" / "sweep_series.json").read_text(encoding="utf-8"))
    assert series["noise_level"] == [0.1, 0.2] and series["n_replicates"] == [2, 2]


def test_adding_levels_keeps_existing_points(files):
    stub = TranslatorSpec.parse("stub:degrading,s=0.5,seed=0")
    short = sweep(files, [0.1, 0.2], stub, seed=4)
    longer = sweep(files, [0.1, 0.2, 0.3], stub, seed=4)
    assert sweep_tsv(short) == sweep_tsv(longer[:2])
    assert level_seed(4, 0) != level_seed(4, 1) != level_seed(4, 1, 1)


def test_case_changing_sweep(files):
    rows = sweep(files, [0.3, 0.5, 0.7, 0.9], IDENTITY, kind=Kind.CASE_CHANGING)
    # BLEU is case-insensitive, so re-casing alone never costs anything
    assert all(r.report.robust == 100.0 and r.report.consis == 100.0 for r in rows)


@pytest.mark.parametrize("grid", [[], [0.2, 0.1], [0.1, 0.1], [0.5, 1.5]])
def test_grid_validation(files, grid):
    with pytest.raises(ValueError):
        SweepConfig(files["src"], files["ref"], Kind.MISSPELLING, grid, IDENTITY)


def test_file_translator_rejected_for_sweep(files):
    with pytest.raises(DataError):
        sweep(files, [0.1], TranslatorSpec.parse(f"file:{files['ref']}"))


# correlate


def test_correlate_groups():
    rows = [("line", x, 2 * x + 1) for x in (1.0, 2.0, 3.0)]
    rows += [("noisy", 1.0, 1.0), ("noisy", 2.0, 3.0), ("noisy", 3.0, 2.0)]
    rows += [("flat", 1.0, 5.0), ("flat", 2.0, 5.0)]
    result = run_correlate(rows).to_dict()
    assert result["groups"]["line"]["r"] == pytest.approx(1.0)
    assert result["groups"]["noisy"]["r"] == pytest.approx(0.5)
    assert result["groups"]["flat"]["r"] is None and "variance" in result["groups"]["flat"]["error"]
    assert result["scatter"]["line"]["consis"] == [3.0, 5.0, 7.0]


def test_correlate_on_sweep_output(files, tmp_path):
    stub = TranslatorSpec.parse("stub:degrading,s=1,seed=0")
    grid = [0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6]
    sweep(files, grid, stub, out_dir=str(tmp_path))
    rows = read_correlation_rows(tmp_path / "sweep.tsv")
    assert len(rows) == 8
    assert run_correlate(rows).groups[stub.label()]["r"] > 0.9


def test_correlation_rows_without_group(tmp_path):
    (tmp_path / "t.tsv").write_text("noise_level\trobust\tconsis\n0.1\t90\t91\n0.2\t80\t82\n", encoding="utf-8")
    assert read_correlation_rows(tmp_path / "t.tsv") == [("all", 90.0, 91.0), ("all", 80.0, 82.0)]
    (tmp_path / "bad.tsv").write_text("noise_level\trobust\n0.1\t90\n", encoding="utf-8")
    with pytest.raises(DataError):
        read_correlation_rows(tmp_path / "bad.tsv")
