from .synthetic import (
    Corpus,
    builtin_corpus,
    builtin_kernels,
    load_corpus_dir,
    make_test_image,
    make_trajectory_kernel,
    synth_blur,
)
from .metrics import align_kernels, best_kernel_offset, psnr, ssd
from .trials import (
    SUCCESS_THRESHOLD,
    Histogram,
    TrialRecord,
    TrialSpec,
    build_trial_specs,
    cumulative_histogram,
    error_ratio,
    kernel_size_for_setting,
    run_trial,
    run_trials,
    summarize,
    write_histogram_csv,
    write_trials_csv,
)

__all__ = [
    'Corpus',
    'builtin_corpus',
    'builtin_kernels',
    'load_corpus_dir',
    'make_test_image',
    'make_trajectory_kernel',
    'synth_blur',
    'align_kernels',
    'best_kernel_offset',
    'psnr',
    'ssd',
    'SUCCESS_THRESHOLD',
    'Histogram',
    'TrialRecord',
    'TrialSpec',
    'build_trial_specs',
    'cumulative_histogram',
    'error_ratio',
    'kernel_size_for_setting',
    'run_trial',
    'run_trials',
    'summarize',
    'write_histogram_csv',
    'write_trials_csv',
]
