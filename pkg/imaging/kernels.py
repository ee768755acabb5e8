"""
Blur-kernel helpers: the Dirac pulse, projection onto C = {k >= 0, sum(k) = 1},
and moving kernels between their own window and a full image grid.
"""
from typing import Tuple

import numpy as np

from .errors import DegenerateKernelError, InvalidArgumentError
from .raster import KernelF, as_image, as_kernel

SUM_TOLERANCE = 1e-12


def dirac_kernel(size: int) -> KernelF:
    """Odd ``size`` x ``size`` kernel with all mass at the center."""
    if size < 1 or size % 2 == 0:
        raise InvalidArgumentError(f"kernel size must be odd and >= 1, got {size}")
    ker = np.zeros((size, size))
    ker[size // 2, size // 2] = 1.0
    return ker


def project_simplex(raw) -> KernelF:
    """
    Project a raster onto C by clipping negatives and dividing by the remaining sum.

    Idempotent on members of C. Raises DegenerateKernelError when no sample is positive.
    """
    ker = as_kernel(raw)
    clipped = np.maximum(ker, 0.0)
    total = clipped.sum()
    if not total > 0.0:
        raise DegenerateKernelError("kernel has no positive mass to normalize",
                                    {"size": ker.shape[0]})
    projected = clipped / total
    # one more division pulls the float sum back onto 1 for badly scaled inputs
    residual = projected.sum()
    if abs(residual - 1.0) > SUM_TOLERANCE:
        projected = projected / residual
    return projected


def in_constraint_set(ker: np.ndarray, tol: float = SUM_TOLERANCE) -> bool:
    """True when ``ker`` is nonnegative and sums to 1 within ``tol``."""
    arr = np.asarray(ker, dtype=np.float64)
    return bool(arr.min() >= 0.0 and abs(arr.sum() - 1.0) <= tol)


def pad_kernel(ker: KernelF, size: int) -> KernelF:
    """Zero-pad an odd kernel to a larger odd ``size`` keeping it centered."""
    ker = as_kernel(ker)
    current = ker.shape[0]
    if size < current or (size - current) % 2:
        raise InvalidArgumentError(f"cannot pad a {current}x{current} kernel to {size}x{size}")
    margin = (size - current) // 2
    return np.pad(ker, margin)


def embed_kernel(ker: KernelF, shape: Tuple[int, int]) -> np.ndarray:
    """
    Place a centered kernel on a full grid with its center at index (0, 0).

    This is the layout whose 2-D DFT is the kernel's transfer function.
    """
    ker = as_kernel(ker)
    size = ker.shape[0]
    height, width = shape
    if size > min(height, width):
        raise InvalidArgumentError(f"kernel of size {size} does not fit a {height}x{width} grid")
    full = np.zeros((height, width))
    full[:size, :size] = ker
    return np.roll(full, shift=(-(size // 2), -(size // 2)), axis=(0, 1))


def crop_kernel(full: np.ndarray, size: int) -> np.ndarray:
    """Inverse of :func:`embed_kernel`: the central ``size`` x ``size`` window around index (0, 0)."""
    full = as_image(full, "kernel grid")
    if size % 2 == 0 or size > min(full.shape):
        raise InvalidArgumentError(f"cannot crop a {size}x{size} window from a {full.shape} grid")
    centered = np.roll(full, shift=(size // 2, size // 2), axis=(0, 1))
    return centered[:size, :size].copy()
