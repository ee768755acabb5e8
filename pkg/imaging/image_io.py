"""
Image and kernel file formats.

Images: 8/16-bit PNG and PGM through Pillow, normalized to [0, 1] on read and
clamped/re-quantized on write. Kernels: plain text, "size N" then N rows of N values.
"""
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from .errors import ImageIOError, InvalidArgumentError
from .raster import KernelF, as_kernel

PathLike = Union[str, Path]

SIXTEEN_BIT_MODES = {"I;16", "I;16B", "I;16L", "I;16N", "I"}


def read_image(path: PathLike) -> np.ndarray:
    """Read a PNG/PGM as float64 in [0, 1]; grayscale gives H x W, colour gives H x W x 3."""
    path = Path(path)
    if not path.exists():
        raise ImageIOError(f"image not found: {path}")
    try:
        with Image.open(path) as img:
            mode = img.mode
            if mode in SIXTEEN_BIT_MODES:
                return np.asarray(img, dtype=np.float64) / 65535.0
            if mode == "F":
                return np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
            if mode in ("1", "L", "LA") or (mode == "P" and _is_gray_palette(img)):
                return np.asarray(img.convert("L"), dtype=np.float64) / 255.0
            return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    except (OSError, ValueError) as exc:
        raise ImageIOError(f"could not read image {path}: {exc}") from exc


def _is_gray_palette(img: Image.Image) -> bool:
    palette = img.getpalette() or []
    triples = np.asarray(palette[: len(palette) // 3 * 3]).reshape(-1, 3)
    return bool(np.all(triples[:, 0] == triples[:, 1]) and np.all(triples[:, 1] == triples[:, 2]))


def write_image(path: PathLike, img: np.ndarray, bit_depth: int = 8) -> Path:
    """
    Clamp to [0, 1], quantize and write.

    16-bit output is only available for single-channel PNG; colour and PGM fall back to 8-bit.
    """
    path = Path(path)
    if bit_depth not in (8, 16):
        raise InvalidArgumentError(f"bit depth must be 8 or 16, got {bit_depth}")
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    if arr.ndim not in (2, 3):
        raise InvalidArgumentError(f"cannot write an array of shape {arr.shape} as an image")
    use_16 = bit_depth == 16 and arr.ndim == 2 and path.suffix.lower() == ".png"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if use_16:
            Image.fromarray(np.round(arr * 65535.0).astype(np.uint16)).save(path)
        else:
            Image.fromarray(np.round(arr * 255.0).astype(np.uint8)).save(path)
    except (OSError, ValueError) as exc:
        raise ImageIOError(f"could not write image {path}: {exc}") from exc
    return path


def kernel_to_text(ker: KernelF) -> str:
    ker = as_kernel(ker)
    lines = [f"size {ker.shape[0]}"]
    lines.extend(" ".join(f"{value:.17g}" for value in row) for row in ker)
    return "\n".join(lines) + "\n"


def kernel_from_text(text: str) -> KernelF:
    """Parse the "size N" + N rows format."""
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not lines or not lines[0].startswith("size"):
        raise InvalidArgumentError("kernel text must start with a 'size N' line")
    try:
        size = int(lines[0].split()[1])
        rows = [[float(token) for token in line.split()] for line in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed kernel text: {exc}") from exc
    if len(rows) != size or any(len(row) != size for row in rows):
        raise InvalidArgumentError(f"kernel text declares size {size} but has a different shape")
    return as_kernel(np.array(rows))


def save_kernel_text(path: PathLike, ker: KernelF) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(kernel_to_text(ker), encoding="utf-8")
    except OSError as exc:
        raise ImageIOError(f"could not write kernel {path}: {exc}") from exc
    return path


def load_kernel_text(path: PathLike) -> KernelF:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ImageIOError(f"could not read kernel {path}: {exc}") from exc
    return kernel_from_text(text)


def kernel_visualization(ker: KernelF, zoom: int = 5) -> np.ndarray:
    """Max-normalized kernel enlarged ``zoom`` times with bilinear interpolation, as uint8."""
    ker = as_kernel(ker)
    if zoom < 1:
        raise InvalidArgumentError(f"kernel zoom must be >= 1, got {zoom}")
    peak = ker.max()
    scaled = ker / peak if peak > 0 else np.zeros_like(ker)
    img = Image.fromarray(np.round(np.clip(scaled, 0.0, 1.0) * 255.0).astype(np.uint8))
    side = ker.shape[0] * zoom
    return np.asarray(img.resize((side, side), Image.Resampling.BILINEAR))


def save_kernel_png(path: PathLike, ker: KernelF, zoom: int = 5) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(kernel_visualization(ker, zoom)).save(path)
    except OSError as exc:
        raise ImageIOError(f"could not write kernel image {path}: {exc}") from exc
    return path
