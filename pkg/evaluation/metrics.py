"""
Image and kernel comparison metrics.
"""
import math
from typing import Tuple

import numpy as np

from imaging.errors import InvalidArgumentError
from imaging.kernels import pad_kernel
from imaging.raster import KernelF, as_kernel, circular_shift


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")


def ssd(a: np.ndarray, b: np.ndarray, border_crop: int = 0) -> float:
    """Sum of squared differences over the region left after cropping ``border_crop`` px per side."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    if border_crop < 0:
        raise InvalidArgumentError(f"border_crop must be >= 0, got {border_crop}")
    if 2 * border_crop >= min(a.shape[0], a.shape[1]):
        raise InvalidArgumentError(f"border_crop {border_crop} leaves nothing of a {a.shape} image")
    if border_crop:
        a = a[border_crop:-border_crop, border_crop:-border_crop]
        b = b[border_crop:-border_crop, border_crop:-border_crop]
    return float(np.sum((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; identical inputs give ``math.inf``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse)


def _signed_offsets(size: int):
    """All circular offsets of a size-n axis, smallest magnitude first."""
    half = size // 2
    return sorted(range(-half, size - half), key=lambda o: (abs(o), o))


def best_kernel_offset(k_est: KernelF, k_true: KernelF) -> Tuple[int, int]:
    """
    Integer circular shift (dy, dx) of ``k_est`` maximizing its correlation with ``k_true``.

    Offsets are searched exhaustively; on ties the offset with the smallest |dy| + |dx| wins.
    """
    k_est = as_kernel(k_est)
    k_true = as_kernel(k_true)
    _check_same_shape(k_est, k_true)
    n = k_est.shape[0]
    candidates = sorted(((dy, dx) for dy in _signed_offsets(n) for dx in _signed_offsets(n)),
                        key=lambda o: (abs(o[0]) + abs(o[1]), abs(o[0]), o))
    best, best_score = (0, 0), -math.inf
    for dy, dx in candidates:
        score = float(np.sum(circular_shift(k_est, dy, dx) * k_true))
        if score > best_score:
            best, best_score = (dy, dx), score
    return best


def align_kernels(k_est: KernelF, k_true: KernelF) -> KernelF:
    """
    Circularly shift ``k_est`` onto ``k_true``.

    Kernels of different sizes are compared on the larger grid; the result lives on that grid.
    """
    k_est = as_kernel(k_est)
    k_true = as_kernel(k_true)
    size = max(k_est.shape[0], k_true.shape[0])
    k_est = pad_kernel(k_est, size)
    k_true = pad_kernel(k_true, size)
    dy, dx = best_kernel_offset(k_est, k_true)
    return circular_shift(k_est, dy, dx)
