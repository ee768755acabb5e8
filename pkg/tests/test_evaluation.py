"""Tests for synthetic blur, metrics, trials and histograms."""
import math

import numpy as np
import pandas as pd
import pytest

from evaluation import (
    Corpus,
    TrialRecord,
    align_kernels,
    best_kernel_offset,
    build_trial_specs,
    builtin_corpus,
    cumulative_histogram,
    error_ratio,
    kernel_size_for_setting,
    load_corpus_dir,
    make_test_image,
    make_trajectory_kernel,
    psnr,
    run_trials,
    ssd,
    summarize,
    synth_blur,
    write_histogram_csv,
    write_trials_csv,
)
from imaging.errors import InvalidArgumentError
from imaging.fourier import convolve_circular
from imaging.image_io import save_kernel_text, write_image
from imaging.kernels import dirac_kernel, in_constraint_set, project_simplex
from imaging.raster import circular_shift
from pipeline import SolverParams, Variant
from restoration import NonBlindParams


def _record(ratio, image="a", kernel="k1", variant="R1", setting="true"):
    return TrialRecord(image=image, kernel=kernel, setting=setting, ssd_est=ratio, ssd_true=1.0,
                       ratio=ratio, psnr_db=25.0, seconds=0.1, variant=variant)


def _small_corpus():
    images = {"blobs": make_test_image("blobs", 48, seed=1), "stripes": make_test_image("stripes", 48, seed=2)}
    kernels = {"k1": make_trajectory_kernel(5, 3.0, 0.5, seed=1),
               "k2": make_trajectory_kernel(7, 4.0, 0.8, seed=2)}
    return Corpus(images=images, kernels=kernels)


def test_synth_blur_with_dirac_and_no_noise(smooth_image):
    assert np.allclose(synth_blur(smooth_image, dirac_kernel(5), 0.0, seed=3), smooth_image, atol=1e-14)


def test_synth_blur_noise_level_and_determinism(motion_kernel):
    x = make_test_image("clouds", 128, seed=4)
    y = synth_blur(x, motion_kernel, 0.01, seed=11)
    residual = y - convolve_circular(x, motion_kernel)
    assert abs(residual.std() - 0.01) <= 0.05 * 0.01
    assert np.array_equal(y, synth_blur(x, motion_kernel, 0.01, seed=11))
    assert not np.array_equal(y, synth_blur(x, motion_kernel, 0.01, seed=12))
    with pytest.raises(InvalidArgumentError):
        synth_blur(x, motion_kernel, -0.1, seed=0)


def test_trajectory_kernels_are_in_constraint_set():
    for seed in range(20):
        ker = make_trajectory_kernel(13, 9.0, 1.0, seed=seed)
        assert ker.shape == (13, 13)
        assert in_constraint_set(ker)


def test_straight_trajectory_has_narrow_support():
    horizontal = make_trajectory_kernel(9, 6.0, 0.0, seed=1, angle=0.0)
    assert np.count_nonzero(horizontal.sum(axis=1) > 1e-12) <= 2
    assert np.count_nonzero(horizontal.sum(axis=0) > 1e-12) >= 6
    vertical = make_trajectory_kernel(9, 6.0, 0.0, seed=1, angle=np.pi / 2)
    assert np.count_nonzero(vertical.sum(axis=0) > 1e-12) <= 2


def test_trajectory_kernel_edge_cases():
    assert np.array_equal(make_trajectory_kernel(7, 0.0, 0.5, seed=0), dirac_kernel(7))
    with pytest.raises(InvalidArgumentError):
        make_trajectory_kernel(7, 7.0, 0.5, seed=0)
    with pytest.raises(InvalidArgumentError):
        make_trajectory_kernel(8, 3.0, 0.5, seed=0)


def test_builtin_corpus_layout():
    corpus = builtin_corpus()
    assert len(corpus) == 32
    assert sorted(corpus.images) == ["blobs", "clouds", "shapes", "stripes"]
    assert [corpus.kernels[f"k{i}"].shape[0] for i in range(1, 9)] == [9, 11, 13, 13, 15, 17, 19, 19]
    for img in corpus.images.values():
        assert img.shape == (128, 128)
        assert img.min() >= 0.1 - 1e-12 and img.max() <= 0.9 + 1e-12
    assert all(in_constraint_set(k) for k in corpus.kernels.values())
    assert np.array_equal(builtin_corpus().kernels["k3"], corpus.kernels["k3"])


def test_load_corpus_dir(tmp_path, smooth_image, motion_kernel):
    write_image(tmp_path / "scene.png", smooth_image, bit_depth=16)
    save_kernel_text(tmp_path / "shake.txt", motion_kernel)
    corpus = load_corpus_dir(tmp_path)
    assert len(corpus) == 1
    assert list(corpus.pairs())[0][0] == "scene"
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(InvalidArgumentError):
        load_corpus_dir(empty)


def test_ssd_basics(rng):
    a = rng.random((10, 10))
    assert ssd(a, a) == 0.0
    b = a.copy()
    b[5, 4] += 0.25
    assert ssd(a, b, border_crop=2) == pytest.approx(0.0625, abs=1e-15)
    c = a.copy()
    c[0, 0] += 1.0
    assert ssd(a, c, border_crop=1) == 0.0
    direct = sum((a[i, j] - b[i, j]) ** 2 for i in range(10) for j in range(10))
    assert ssd(a, b) == pytest.approx(direct, abs=1e-10)
    assert ssd(a, circular_shift(a, 1, 0)) > 0
    with pytest.raises(InvalidArgumentError):
        ssd(a, a[:5])


def test_psnr_values(rng):
    a = rng.random((16, 16))
    assert psnr(a, a) == math.inf
    assert psnr(np.full((8, 8), 0.5), np.full((8, 8), 0.4)) == pytest.approx(20.0, abs=1e-9)
    b = rng.random((16, 16))
    assert psnr(a, b) == pytest.approx(10 * np.log10(1.0 / np.mean((a - b) ** 2)), abs=1e-10)


def test_align_recovers_known_shift(motion_kernel):
    shifted = circular_shift(motion_kernel, 2, -1)
    assert best_kernel_offset(shifted, motion_kernel) == (-2, 1)
    assert np.array_equal(align_kernels(shifted, motion_kernel), motion_kernel)
    assert np.array_equal(align_kernels(motion_kernel, motion_kernel), motion_kernel)


def test_align_picks_the_best_offset(rng):
    for _ in range(10):
        k_est = project_simplex(rng.random((5, 5)))
        k_true = project_simplex(rng.random((5, 5)))
        dy, dx = best_kernel_offset(k_est, k_true)
        scores = [np.sum(circular_shift(k_est, a, b) * k_true) for a in range(5) for b in range(5)]
        assert np.sum(circular_shift(k_est, dy, dx) * k_true) == pytest.approx(max(scores), abs=1e-15)
        aligned = align_kernels(k_est, k_true)
        assert np.array_equal(np.sort(aligned.ravel()), np.sort(k_est.ravel()))
        assert in_constraint_set(aligned)


def test_cumulative_histogram_counts():
    hist = cumulative_histogram([_record(1.5), _record(2.5), _record(3.5)], max_bin=4)
    assert hist.bins == [1, 2, 3, 4]
    assert hist.fractions == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0])
    ones = cumulative_histogram([_record(1.0)] * 5)
    assert ones.fractions == [0.0, 1.0, 1.0, 1.0, 1.0]
    with pytest.raises(InvalidArgumentError):
        cumulative_histogram([])


def test_cumulative_histogram_matches_direct_count(rng):
    ratios = rng.uniform(0.8, 6.0, 32)
    hist = cumulative_histogram([_record(r) for r in ratios], max_bin=5)
    for r, fraction in zip(hist.bins, hist.fractions):
        assert fraction == sum(1 for q in ratios if q < r) / 32
    assert all(b >= a for a, b in zip(hist.fractions, hist.fractions[1:]))


def test_kernel_size_settings():
    assert kernel_size_for_setting(13, "true") == 13
    assert kernel_size_for_setting(13, "medium") == 21
    assert kernel_size_for_setting(13, "large") == 29
    with pytest.raises(InvalidArgumentError):
        kernel_size_for_setting(13, "huge")


def test_error_ratio_of_true_kernel_is_one(smooth_image, motion_kernel):
    y = synth_blur(smooth_image, motion_kernel, 0.005, seed=0)
    record = error_ratio(smooth_image, y, motion_kernel, motion_kernel, image_id="img", kernel_id="k")
    assert record.ratio == 1.0
    assert record.ssd_est == record.ssd_true
    assert record.success


def test_error_ratio_of_dirac_exceeds_one(smooth_image):
    ker = make_trajectory_kernel(9, 7.0, 0.6, seed=8)
    y = synth_blur(smooth_image, ker, 0.005, seed=0)
    record = error_ratio(smooth_image, y, dirac_kernel(9), ker)
    assert record.ratio > 1.0


def test_csv_tables(tmp_path):
    records = [_record(1.0), _record(2.0, kernel="k2")]
    trials = write_trials_csv(records, tmp_path / "trials.csv")
    assert trials.read_text().splitlines()[0] == "image,kernel,setting,ssd_est,ssd_true,ratio,psnr_db,seconds"
    assert len(pd.read_csv(trials)) == 2
    histogram = write_histogram_csv(cumulative_histogram(records), tmp_path / "histogram.csv")
    assert histogram.read_text().splitlines()[0] == "bin,fraction"


def test_summarize():
    summary = summarize([_record(1.0), _record(2.0), _record(4.0)])
    assert summary["trials"] == 3
    assert summary["success_count"] == 2
    assert summary["mean_ratio"] == pytest.approx(7 / 3)
    assert summary["median_ratio"] == 2.0


def test_build_trial_specs():
    corpus = _small_corpus()
    specs = build_trial_specs(corpus, SolverParams(), NonBlindParams(), [Variant.R1, Variant.R3],
                              ["true", "medium"], seed=10)
    assert len(specs) == 4 * 2 * 2
    assert {s.seed for s in specs} == {10, 11, 12, 13}
    assert {s.params.variant for s in specs} == {Variant.R1, Variant.R3}
    with pytest.raises(InvalidArgumentError):
        build_trial_specs(corpus, SolverParams(), NonBlindParams(), [Variant.R1], ["tiny"])


def test_oracle_trials_report_unit_ratios():
    specs = build_trial_specs(_small_corpus(), SolverParams(), NonBlindParams(), [Variant.R1], ["true"],
                              oracle_kernel=True)
    serial = run_trials(specs, jobs=1)
    parallel = run_trials(reversed(specs), jobs=2)
    assert [r.ratio for r in serial] == [1.0] * 4
    assert [(r.image, r.kernel) for r in serial] == [("blobs", "k1"), ("blobs", "k2"),
                                                     ("stripes", "k1"), ("stripes", "k2")]
    assert [(r.image, r.kernel, r.ssd_est) for r in parallel] == [(r.image, r.kernel, r.ssd_est) for r in serial]


def test_estimated_trial_runs_end_to_end():
    corpus = _small_corpus()
    corpus.kernels = {"k1": corpus.kernels["k1"]}
    corpus.images = {"blobs": corpus.images["blobs"]}
    params = SolverParams(scales=2, outer_iters=2, inner_iters_x=2, inner_iters_k=2)
    records = run_trials(build_trial_specs(corpus, params, NonBlindParams(), [Variant.R2], ["true"]))
    assert len(records) == 1
    assert records[0].variant == "R2"
    assert records[0].ratio > 0 and np.isfinite(records[0].ratio)


@pytest.mark.slow
def test_textured_image_recovery_succeeds_on_most_kernels():
    corpus = builtin_corpus()
    corpus.images = {"shapes": corpus.images["shapes"]}
    specs = build_trial_specs(corpus, SolverParams(), NonBlindParams(), [Variant.R1], ["true"])
    records = run_trials(specs, jobs=4)
    assert sum(r.success for r in records) >= 7


@pytest.mark.slow
def test_ablation_ordering_over_builtin_corpus():
    specs = build_trial_specs(builtin_corpus(), SolverParams(), NonBlindParams(),
                              [Variant.R1, Variant.R2, Variant.R3], ["true"])
    records = run_trials(specs, jobs=4)
    by_variant = {v: [r for r in records if r.variant == v] for v in ("R1", "R2", "R3")}
    means = {v: np.mean([r.ratio for r in rs]) for v, rs in by_variant.items()}
    assert means["R1"] <= means["R2"] <= means["R3"] + 0.2
    assert sum(r.success for r in by_variant["R1"]) >= sum(r.success for r in by_variant["R3"])


@pytest.mark.slow
def test_medium_kernel_size_is_nearly_as_good():
    corpus = builtin_corpus()
    corpus.images = {"blobs": corpus.images["blobs"]}
    specs = build_trial_specs(corpus, SolverParams(), NonBlindParams(), [Variant.R1], ["true", "medium"])
    records = run_trials(specs, jobs=4)
    true_mean = np.mean([r.ratio for r in records if r.setting == "true"])
    medium_mean = np.mean([r.ratio for r in records if r.setting == "medium"])
    assert medium_mean - true_mean <= 0.5
