"""
Synthetic blur generation and the built-in evaluation corpus.

The corpus mirrors a 4 images x 8 kernels benchmark layout: four procedural
128x128 textures and eight trajectory kernels of sizes 9 to 19.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from imaging.errors import InvalidArgumentError
from imaging.fourier import convolve_circular
from imaging.image_io import load_kernel_text, read_image
from imaging.kernels import dirac_kernel, project_simplex
from imaging.raster import ImageF, KernelF, as_image, as_kernel, to_grayscale

logger = logging.getLogger(__name__)

CORPUS_IMAGE_SIZE = 128
CORPUS_KERNEL_SIZES = (9, 11, 13, 13, 15, 17, 19, 19)
IMAGE_EXTENSIONS = (".png", ".pgm")


def synth_blur(x: ImageF, ker: KernelF, noise_sigma: float, seed: int) -> ImageF:
    """Circular blur plus i.i.d. Gaussian noise of standard deviation ``noise_sigma``; no clipping."""
    if noise_sigma < 0:
        raise InvalidArgumentError(f"noise_sigma must be >= 0, got {noise_sigma}")
    blurred = convolve_circular(as_image(x, "sharp image"), as_kernel(ker))
    if noise_sigma == 0:
        return blurred
    rng = np.random.default_rng(seed)
    return blurred + rng.normal(0.0, noise_sigma, size=blurred.shape)


def make_trajectory_kernel(size: int, length: float, curvature: float, seed: int,
                           angle: Optional[float] = None) -> KernelF:
    """
    Rasterize a smooth random camera trajectory into a ``size`` x ``size`` kernel.

    The heading starts at ``angle`` (random when omitted) and drifts by a random walk scaled
    by ``curvature``; the path is centred on its bounding box and deposited bilinearly.
    """
    if size < 1 or size % 2 == 0:
        raise InvalidArgumentError(f"kernel size must be odd, got {size}")
    if not 0 <= length < size:
        raise InvalidArgumentError(f"trajectory length must lie in [0, {size}), got {length}")
    if length == 0:
        return dirac_kernel(size)

    rng = np.random.default_rng(seed)
    heading0 = rng.uniform(0.0, np.pi) if angle is None else float(angle)
    samples = int(np.ceil(length * 4)) + 1
    ds = length / (samples - 1)
    drift = np.concatenate([[0.0], np.cumsum(rng.standard_normal(samples - 2) * np.sqrt(ds))])
    heading = heading0 + curvature * drift
    steps = np.stack([np.cos(heading), np.sin(heading)], axis=1) * ds
    path = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    path -= (path.min(axis=0) + path.max(axis=0)) / 2.0

    c = size // 2
    path = np.clip(path, -c, c)
    cols = path[:, 0] + c
    rows = path[:, 1] + c
    c0 = np.floor(cols).astype(int)
    r0 = np.floor(rows).astype(int)
    fc = cols - c0
    fr = rows - r0
    ker = np.zeros((size, size))
    for dr, dc, weight in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                           (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        np.add.at(ker, (np.clip(r0 + dr, 0, size - 1), np.clip(c0 + dc, 0, size - 1)), weight)
    return project_simplex(ker)


def _normalize(img: np.ndarray, low: float = 0.1, high: float = 0.9) -> ImageF:
    span = img.max() - img.min()
    if span == 0:
        return np.full_like(img, (low + high) / 2.0)
    return low + (high - low) * (img - img.min()) / span


def _blobs(rng: np.random.Generator, size: int) -> ImageF:
    field_ = ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma=size / 16, mode="wrap")
    return _normalize(1.0 / (1.0 + np.exp(-field_ / (field_.std() * 0.15))))


def _shapes(rng: np.random.Generator, size: int) -> ImageF:
    img = np.full((size, size), 0.5)
    rows, cols = np.mgrid[:size, :size]
    for _ in range(12):
        value = rng.uniform(0.0, 1.0)
        cy, cx = rng.uniform(0, size, 2)
        extent = rng.uniform(size / 16, size / 5)
        if rng.uniform() < 0.5:
            mask = (rows - cy) ** 2 + (cols - cx) ** 2 < extent ** 2
        else:
            mask = (np.abs(rows - cy) < extent) & (np.abs(cols - cx) < extent * rng.uniform(0.4, 1.0))
        img[mask] = value
    return _normalize(ndimage.gaussian_filter(img, sigma=0.7, mode="wrap"))


def _stripes(rng: np.random.Generator, size: int) -> ImageF:
    rows, cols = np.mgrid[:size, :size]
    img = np.zeros((size, size))
    half = size // 2
    for qr in (0, half):
        for qc in (0, half):
            theta = rng.uniform(0.0, np.pi)
            period = rng.uniform(8.0, 20.0)
            phase = (np.cos(theta) * cols + np.sin(theta) * rows) * 2 * np.pi / period
            img[qr:qr + half, qc:qc + half] = np.sign(np.sin(phase))[qr:qr + half, qc:qc + half]
    return _normalize(ndimage.gaussian_filter(img, sigma=1.0, mode="wrap"))


def _clouds(rng: np.random.Generator, size: int) -> ImageF:
    img = np.zeros((size, size))
    for octave in range(4):
        sigma = size / 8 / 2 ** octave
        img += ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma, mode="wrap") * sigma
    edges = ndimage.gaussian_filter((img > np.median(img)).astype(float), sigma=1.0, mode="wrap")
    return _normalize(0.5 * _normalize(img, 0.0, 1.0) + 0.5 * edges)


TEXTURES: Dict[str, Callable[[np.random.Generator, int], ImageF]] = {
    "blobs": _blobs,
    "shapes": _shapes,
    "stripes": _stripes,
    "clouds": _clouds,
}


def make_test_image(name: str, size: int = CORPUS_IMAGE_SIZE, seed: int = 0) -> ImageF:
    """One procedural test image with values in [0.1, 0.9]."""
    if name not in TEXTURES:
        raise InvalidArgumentError(f"unknown test image {name!r}; expected one of {sorted(TEXTURES)}")
    return TEXTURES[name](np.random.default_rng(seed), size)


@dataclass
class Corpus:
    """Sharp images and ground-truth kernels, keyed by id."""
    images: Dict[str, ImageF] = field(default_factory=dict)
    kernels: Dict[str, KernelF] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.images) * len(self.kernels)

    def pairs(self) -> Iterator[Tuple[str, ImageF, str, KernelF]]:
        for image_id in sorted(self.images):
            for kernel_id in sorted(self.kernels):
                yield image_id, self.images[image_id], kernel_id, self.kernels[kernel_id]


def builtin_kernels() -> Dict[str, KernelF]:
    kernels = {}
    for idx, size in enumerate(CORPUS_KERNEL_SIZES):
        curvature = 0.0 if idx % 4 == 0 else 0.6 + 0.2 * (idx % 3)
        length = 0.7 * (size - 1)
        kernels[f"k{idx + 1}"] = make_trajectory_kernel(size, length, curvature, seed=100 + idx)
    return kernels


def builtin_corpus(seed: int = 0) -> Corpus:
    """Four textures times eight trajectory kernels."""
    images = {name: make_test_image(name, CORPUS_IMAGE_SIZE, seed + idx)
              for idx, name in enumerate(TEXTURES)}
    return Corpus(images=images, kernels=builtin_kernels())


def load_corpus_dir(path: Union[str, Path]) -> Corpus:
    """
    Corpus from a directory of sharp images (*.png, *.pgm) and kernels (*.txt).

    Colour images are converted to luma.
    """
    root = Path(path)
    if not root.is_dir():
        raise InvalidArgumentError(f"corpus directory not found: {root}")
    images = {p.stem: to_grayscale(read_image(p)) for p in sorted(root.iterdir())
              if p.suffix.lower() in IMAGE_EXTENSIONS}
    kernels = {p.stem: load_kernel_text(p) for p in sorted(root.glob("*.txt"))}
    corpus = Corpus(images=images, kernels=kernels)
    if len(corpus) == 0:
        raise InvalidArgumentError(
            f"corpus {root} is empty: found {len(images)} images and {len(kernels)} kernels")
    logger.info("📂 loaded corpus %s: %d images, %d kernels", root, len(images), len(kernels))
    return corpus
