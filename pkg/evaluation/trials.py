"""
Trial execution, SSD error ratios, cumulative histograms and CSV tables.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from imaging.errors import InvalidArgumentError
from imaging.raster import ImageF, KernelF, as_kernel
from pipeline.multiscale import MultiScaleDeblurrer
from pipeline.params import SolverParams, Variant
from restoration.hyper_laplacian import NonBlindParams, deconvolve
from .metrics import align_kernels, psnr, ssd
from .synthetic import Corpus, synth_blur

logger = logging.getLogger(__name__)

SUCCESS_THRESHOLD = 3.0
TRIAL_COLUMNS = ["image", "kernel", "setting", "ssd_est", "ssd_true", "ratio", "psnr_db", "seconds"]
HISTOGRAM_COLUMNS = ["bin", "fraction"]
SETTING_MARGINS = {"true": 0, "medium": 8, "large": 16}


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one (image, kernel, setting, variant) trial."""
    image: str
    kernel: str
    setting: str
    ssd_est: float
    ssd_true: float
    ratio: float
    psnr_db: float
    seconds: float
    variant: str = Variant.R1.value

    @property
    def success(self) -> bool:
        return self.ratio < SUCCESS_THRESHOLD

    def to_row(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in TRIAL_COLUMNS}


@dataclass(frozen=True)
class Histogram:
    """Cumulative error-ratio histogram: fraction of trials with ratio < r for r = 1..R."""
    bins: List[int]
    fractions: List[float]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"bin": self.bins, "fraction": self.fractions}, columns=HISTOGRAM_COLUMNS)


def kernel_size_for_setting(true_size: int, setting: str) -> int:
    """Estimation kernel size under a sweep setting: true size, +8 (medium) or +16 (large)."""
    if setting not in SETTING_MARGINS:
        raise InvalidArgumentError(
            f"unknown kernel-size setting {setting!r}; expected one of {list(SETTING_MARGINS)}")
    return int(true_size) + SETTING_MARGINS[setting]


def error_ratio(x_true: ImageF, y: ImageF, k_est: KernelF, k_true: KernelF,
                nonblind: NonBlindParams = NonBlindParams(), image_id: str = "",
                kernel_id: str = "", setting: str = "true", variant: str = Variant.R1.value,
                seconds: float = 0.0, border_crop: Optional[int] = None) -> TrialRecord:
    """
    Deconvolve ``y`` with the aligned estimate and with the ground truth, and compare SSDs.

    Both arms use the same non-blind settings, so identical kernels give a ratio of exactly 1.
    ``border_crop`` defaults to the ground-truth kernel radius.
    """
    k_true = as_kernel(k_true, "ground-truth kernel")
    aligned = align_kernels(k_est, k_true)
    crop = k_true.shape[0] // 2 if border_crop is None else border_crop
    x_est = deconvolve(y, aligned, nonblind)
    x_ref = deconvolve(y, k_true, nonblind)
    ssd_est = ssd(x_est, x_true, crop)
    ssd_true = ssd(x_ref, x_true, crop)
    if ssd_true == 0:
        ratio = 1.0 if ssd_est == 0 else math.inf
    else:
        ratio = ssd_est / ssd_true
    return TrialRecord(image=image_id, kernel=kernel_id, setting=setting,
                       ssd_est=ssd_est, ssd_true=ssd_true, ratio=ratio,
                       psnr_db=psnr(x_est, x_true), seconds=seconds, variant=variant)


@dataclass(frozen=True)
class TrialSpec:
    """Everything one worker needs to run a trial."""
    image_id: str
    image: ImageF
    kernel_id: str
    kernel: KernelF
    setting: str
    params: SolverParams
    nonblind: NonBlindParams
    noise_sigma: float
    seed: int
    oracle_kernel: bool = False


def run_trial(spec: TrialSpec) -> TrialRecord:
    """Blur, estimate the kernel (or inject the true one), and score the estimate."""
    start = time.perf_counter()
    y = synth_blur(spec.image, spec.kernel, spec.noise_sigma, spec.seed)
    if spec.oracle_kernel:
        k_est = spec.kernel
    else:
        size = kernel_size_for_setting(spec.kernel.shape[0], spec.setting)
        k_est = MultiScaleDeblurrer(spec.params.replace(kernel_size=size), spec.nonblind).estimate(y).kernel
    elapsed = time.perf_counter() - start
    record = error_ratio(spec.image, y, k_est, spec.kernel, spec.nonblind,
                         image_id=spec.image_id, kernel_id=spec.kernel_id,
                         setting=spec.setting, variant=spec.params.variant.value, seconds=elapsed)
    logger.info("🧪 %s/%s [%s, %s]: ratio %.3f, %.1f dB, %.1f s", spec.image_id, spec.kernel_id,
                record.variant, spec.setting, record.ratio, record.psnr_db, elapsed)
    return record


def build_trial_specs(corpus: Corpus, params: SolverParams, nonblind: NonBlindParams,
                      variants: Sequence[Variant], settings: Sequence[str],
                      noise_sigma: float = 0.005, seed: int = 0,
                      oracle_kernel: bool = False) -> List[TrialSpec]:
    """Cross product of corpus pairs, variants and settings; each pair gets its own noise seed."""
    unknown = [s for s in settings if s not in SETTING_MARGINS]
    if unknown:
        raise InvalidArgumentError(f"unknown kernel-size settings {unknown}; expected {list(SETTING_MARGINS)}")
    specs = []
    for pair_index, (image_id, image, kernel_id, kernel) in enumerate(corpus.pairs()):
        for variant in variants:
            for setting in settings:
                specs.append(TrialSpec(
                    image_id=image_id, image=image, kernel_id=kernel_id, kernel=kernel,
                    setting=setting, params=params.replace(variant=variant), nonblind=nonblind,
                    noise_sigma=noise_sigma, seed=seed + pair_index, oracle_kernel=oracle_kernel))
    return specs


def run_trials(specs: Iterable[TrialSpec], jobs: int = 1) -> List[TrialRecord]:
    """Run trials on ``jobs`` worker processes; records come back sorted by (image, kernel, variant, setting)."""
    specs = list(specs)
    if jobs < 1:
        raise InvalidArgumentError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(specs) <= 1:
        records = [run_trial(spec) for spec in specs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_trial, specs))
    return sorted(records, key=lambda r: (r.image, r.kernel, r.variant, r.setting))


def cumulative_histogram(records: Sequence[TrialRecord], max_bin: int = 5) -> Histogram:
    """Bin r (1 <= r <= max_bin) holds the fraction of records with error ratio below r."""
    if not records:
        raise InvalidArgumentError("cannot build a histogram from zero trials")
    if max_bin < 1:
        raise InvalidArgumentError(f"max_bin must be >= 1, got {max_bin}")
    ratios = np.array([r.ratio for r in records], dtype=np.float64)
    bins = list(range(1, max_bin + 1))
    fractions = [float(np.count_nonzero(ratios < r)) / len(ratios) for r in bins]
    return Histogram(bins=bins, fractions=fractions)


def trials_frame(records: Sequence[TrialRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in records], columns=TRIAL_COLUMNS)


def write_trials_csv(records: Sequence[TrialRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    trials_frame(records).to_csv(path, index=False)
    return path


def write_histogram_csv(histogram: Histogram, path: Union[str, Path]) -> Path:
    path = Path(path)
    histogram.to_frame().to_csv(path, index=False)
    return path


def summarize(records: Sequence[TrialRecord], threshold: float = SUCCESS_THRESHOLD) -> Dict[str, Any]:
    """Mean and median ratio, success count and rate, mean PSNR and runtime."""
    if not records:
        raise InvalidArgumentError("cannot summarize zero trials")
    df = trials_frame(records)
    successes = int((df["ratio"] < threshold).sum())
    return {
        "trials": int(len(df)),
        "mean_ratio": float(df["ratio"].mean()),
        "median_ratio": float(df["ratio"].median()),
        "success_count": successes,
        "success_rate": successes / len(df),
        "mean_psnr_db": float(df["psnr_db"].replace(np.inf, np.nan).mean()),
        "total_seconds": float(df["seconds"].sum()),
    }
