"""
Frequency-domain operators under the circular boundary model.

Convolution with a kernel and the forward-difference gradients are block-circulant,
so the 2-D DFT diagonalizes them: each operator becomes a per-frequency transfer function.
"""
from typing import Dict, Tuple, Union

import numpy as np

from .errors import InvalidArgumentError
from .kernels import embed_kernel
from .raster import ImageF, KernelF, Spectrum, as_image, as_kernel

DIRECTIONS = ("h", "v")

Operator = Union[np.ndarray, str]


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise InvalidArgumentError(f"gradient direction must be 'h' or 'v', got {direction!r}")


def gradient(img: ImageF, direction: str) -> ImageF:
    """Forward difference with circular wrap: x[., j+1] - x[., j] ('h') or x[i+1, .] - x[i, .] ('v')."""
    _check_direction(direction)
    axis = 1 if direction == "h" else 0
    return np.roll(img, -1, axis=axis) - img


def gradient_adjoint(field: ImageF, direction: str) -> ImageF:
    """Adjoint of :func:`gradient` (a backward difference, i.e. minus the divergence component)."""
    _check_direction(direction)
    axis = 1 if direction == "h" else 0
    return np.roll(field, 1, axis=axis) - field


def gradient_transfer(direction: str, shape: Tuple[int, int]) -> Spectrum:
    """Transfer function of the forward difference on a ``shape`` grid."""
    _check_direction(direction)
    height, width = shape
    if direction == "h":
        phase = np.exp(2j * np.pi * np.fft.fftfreq(width))[np.newaxis, :]
        return np.broadcast_to(phase - 1.0, (height, width)).copy()
    phase = np.exp(2j * np.pi * np.fft.fftfreq(height))[:, np.newaxis]
    return np.broadcast_to(phase - 1.0, (height, width)).copy()


def transfer_function(op: Operator, width: int, height: int) -> Spectrum:
    """
    Transfer function of a kernel or a gradient operator ('h' / 'v') on a width x height grid.

    Multiplying an image spectrum by the result and inverting equals the spatial circular application.
    """
    if isinstance(op, str):
        return gradient_transfer(op, (height, width))
    return np.fft.fft2(embed_kernel(as_kernel(op), (height, width)))


def apply_transfer(img: ImageF, spectrum: Spectrum) -> ImageF:
    """Pointwise multiply in frequency and return the real part of the inverse transform."""
    return np.real(np.fft.ifft2(np.fft.fft2(img) * spectrum))


def convolve_circular(img: ImageF, ker: KernelF) -> ImageF:
    """Circular convolution of ``img`` with a centered kernel."""
    img = as_image(img)
    ker = as_kernel(ker)
    height, width = img.shape
    if ker.shape[0] > min(height, width):
        raise InvalidArgumentError(
            f"kernel size {ker.shape[0]} exceeds image size {width}x{height}")
    return apply_transfer(img, transfer_function(ker, width, height))


class SpectrumCache:
    """
    Per-invocation cache of transfer functions keyed by (operator, grid).

    A solver builds one of these for each call; nothing is shared across calls.
    """

    def __init__(self):
        self._entries: Dict[tuple, Spectrum] = {}

    def kernel(self, ker: KernelF, shape: Tuple[int, int]) -> Spectrum:
        ker = np.ascontiguousarray(ker, dtype=np.float64)
        key = ("kernel", ker.shape, ker.tobytes(), tuple(shape))
        if key not in self._entries:
            self._entries[key] = transfer_function(ker, shape[1], shape[0])
        return self._entries[key]

    def gradient(self, direction: str, shape: Tuple[int, int]) -> Spectrum:
        key = ("gradient", direction, tuple(shape))
        if key not in self._entries:
            self._entries[key] = gradient_transfer(direction, shape)
        return self._entries[key]

    def gradient_power(self, shape: Tuple[int, int]) -> np.ndarray:
        """|G_h|^2 + |G_v|^2, the symbol of the discrete Laplacian-like operator grad* grad."""
        key = ("gradient_power", tuple(shape))
        if key not in self._entries:
            self._entries[key] = (np.abs(self.gradient("h", shape)) ** 2
                                  + np.abs(self.gradient("v", shape)) ** 2)
        return self._entries[key]

    def __len__(self) -> int:
        return len(self._entries)
