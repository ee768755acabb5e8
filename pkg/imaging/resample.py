"""
Resampling for the coarse-to-fine pyramid and boundary tapering.
"""
from typing import List

import numpy as np
from scipy import ndimage

from .errors import InvalidArgumentError, PyramidTooDeepError
from .fourier import convolve_circular
from .kernels import project_simplex
from .raster import ImageF, KernelF, as_image, as_kernel

MIN_LEVEL_SIZE = 16


def _pixel_centers(out_size: int, in_size: int) -> np.ndarray:
    """Source coordinates of output pixel centers under half-pixel alignment."""
    scale = in_size / out_size
    return (np.arange(out_size) + 0.5) * scale - 0.5


def _bilinear(img: np.ndarray, out_shape, mode: str) -> np.ndarray:
    rows = _pixel_centers(out_shape[0], img.shape[0])
    cols = _pixel_centers(out_shape[1], img.shape[1])
    grid = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(img, grid, order=1, mode=mode, cval=0.0)


def downsample(img: ImageF, factor: float) -> ImageF:
    """
    Bilinear downsampling by ``factor``; output side = round(input side / factor).

    Raises PyramidTooDeepError when either output side would be below 16 pixels.
    """
    img = as_image(img)
    if not factor > 1.0:
        raise InvalidArgumentError(f"downsampling factor must be > 1, got {factor}")
    out_shape = tuple(int(np.floor(side / factor + 0.5)) for side in img.shape)
    if min(out_shape) < MIN_LEVEL_SIZE:
        raise PyramidTooDeepError(
            f"downsampling {img.shape[1]}x{img.shape[0]} by {factor} gives "
            f"{out_shape[1]}x{out_shape[0]}, below {MIN_LEVEL_SIZE} px",
            {"factor": factor})
    return _bilinear(img, out_shape, mode="nearest")


def build_pyramid(img: ImageF, scales: int, factor: float = 2.0) -> List[ImageF]:
    """Coarse-to-fine list of ``scales`` levels; each level downsamples the next finer one."""
    if scales < 1:
        raise InvalidArgumentError(f"scale count must be >= 1, got {scales}")
    levels = [as_image(img)]
    for level in range(1, scales):
        try:
            levels.append(downsample(levels[-1], factor))
        except PyramidTooDeepError as exc:
            raise exc.with_context(scales=scales, level=level)
    return levels[::-1]


def nearest_odd(value: float) -> int:
    return int(2 * np.floor((value - 1.0) / 2.0 + 0.5) + 1)


def pyramid_kernel_sizes(kernel_size: int, scales: int, factor: float = 2.0) -> List[int]:
    """
    Per-level kernel sizes, coarse to fine: max(3, nearest odd to kernel_size / factor^(S - s)).

    The finest level always uses ``kernel_size`` itself.
    """
    if kernel_size < 3 or kernel_size % 2 == 0:
        raise InvalidArgumentError(f"kernel size must be odd and >= 3, got {kernel_size}")
    sizes = [max(3, nearest_odd(kernel_size / factor ** (scales - s))) for s in range(1, scales + 1)]
    sizes[-1] = kernel_size
    # keep the sequence monotone when the factor is small
    for idx in range(len(sizes) - 2, -1, -1):
        sizes[idx] = min(sizes[idx], sizes[idx + 1])
    return sizes


def upsample_kernel(ker: KernelF, new_size: int) -> KernelF:
    """Bilinear upsampling to an odd ``new_size`` followed by projection onto C."""
    ker = as_kernel(ker)
    if new_size % 2 == 0:
        raise InvalidArgumentError(f"upsampled kernel size must be odd, got {new_size}")
    if new_size < ker.shape[0]:
        raise InvalidArgumentError(
            f"upsampled kernel size {new_size} is smaller than {ker.shape[0]}")
    if new_size == ker.shape[0]:
        return project_simplex(ker)
    return project_simplex(_bilinear(ker, (new_size, new_size), mode="grid-constant"))


def _taper_profile(length: int, band: int) -> np.ndarray:
    """Raised-cosine weights: 1 in the interior, falling toward 0 over ``band`` samples at each end."""
    weights = np.ones(length)
    if band <= 0:
        return weights
    ramp = 0.5 * (1.0 - np.cos(np.pi * (np.arange(band) + 0.5) / band))
    band = min(band, length // 2)
    weights[:band] = ramp[:band]
    weights[length - band:] = ramp[:band][::-1]
    return weights


def edge_taper(img: ImageF, ker: KernelF) -> ImageF:
    """
    Blend the image toward its own blurred version in a border band of width = kernel radius.

    This attenuates the wrap-around seam of the circular model; pixels outside the band are
    returned bit-identical.
    """
    img = as_image(img)
    ker = as_kernel(ker)
    band = ker.shape[0] // 2
    if band == 0:
        return img
    weights = np.outer(_taper_profile(img.shape[0], band), _taper_profile(img.shape[1], band))
    blurred = convolve_circular(img, ker)
    blended = weights * img + (1.0 - weights) * blurred
    return np.where(weights == 1.0, img, blended)
