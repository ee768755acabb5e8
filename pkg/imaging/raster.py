"""
Raster types and validation helpers.

Images are 2-D float64 numpy arrays indexed [row, col] (height x width, row-major).
Kernels are square arrays with an odd side; spectra are complex arrays on an image grid.
"""
import numpy as np

from .errors import InvalidArgumentError, NumericalDivergenceError

ImageF = np.ndarray
KernelF = np.ndarray
Spectrum = np.ndarray

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def as_image(data, name: str = "image") -> ImageF:
    """Return a validated 2-D float64 copy of ``data``."""
    img = np.array(data, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-D, got shape {img.shape}")
    if img.size == 0:
        raise InvalidArgumentError(f"{name} is empty")
    if not np.all(np.isfinite(img)):
        raise NumericalDivergenceError(f"{name} contains non-finite samples", iteration=0)
    return img


def as_kernel(data, name: str = "kernel") -> KernelF:
    """Return a validated square, odd-sized float64 copy of ``data``."""
    ker = as_image(data, name)
    rows, cols = ker.shape
    if rows != cols:
        raise InvalidArgumentError(f"{name} must be square, got {rows}x{cols}")
    if rows % 2 == 0:
        raise InvalidArgumentError(f"{name} size must be odd, got {rows}")
    return ker


def to_grayscale(img: np.ndarray) -> ImageF:
    """Luma of an H x W x 3 image; single-channel input is returned as a float copy."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr.copy()
    if arr.ndim == 3 and arr.shape[2] >= 3:
        return arr[..., :3] @ LUMA_WEIGHTS
    if arr.ndim == 3 and arr.shape[2] == 1:
        return arr[..., 0].copy()
    raise InvalidArgumentError(f"cannot convert shape {arr.shape} to grayscale")


def circular_shift(img: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Circularly shift rows by ``dy`` and columns by ``dx``."""
    return np.roll(img, shift=(dy, dx), axis=(0, 1))


def check_finite(arr: np.ndarray, what: str, iteration: int) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalDivergenceError(f"non-finite values in {what}", iteration=iteration)
