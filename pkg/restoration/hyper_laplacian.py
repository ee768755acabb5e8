"""
Non-blind deconvolution with a hyper-Laplacian gradient prior.

Minimizes (fidelity/2) ||k * x - y||^2 + sum |grad x|^p by half-quadratic splitting:
an elementwise lp prox on the gradient split alternates with an FFT-domain quadratic
solve while the split penalty grows geometrically.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from imaging.errors import InvalidArgumentError
from imaging.fourier import DIRECTIONS, SpectrumCache, gradient
from imaging.kernels import project_simplex
from imaging.raster import ImageF, KernelF, as_image, check_finite

logger = logging.getLogger(__name__)

SUPPORTED_EXPONENTS = (0.5, 2.0 / 3.0, 1.0, 2.0)


@dataclass(frozen=True)
class NonBlindParams:
    """Settings of the half-quadratic scheme; penalties are penalty_start * penalty_growth^i."""
    fidelity_weight: float = 2000.0
    prior_exponent: float = 2.0 / 3.0
    hq_iters: int = 4
    penalty_start: float = 4.0
    penalty_growth: float = 4.0
    inner_iters: int = 1

    def __post_init__(self):
        if not self.fidelity_weight > 0:
            raise InvalidArgumentError(f"fidelity_weight must be > 0, got {self.fidelity_weight}")
        # rounded inputs such as 0.667 snap to the exact exponent
        matches = [p for p in SUPPORTED_EXPONENTS if abs(self.prior_exponent - p) < 1e-3]
        if not matches:
            raise InvalidArgumentError(
                f"prior_exponent must be one of 1/2, 2/3, 1, 2; got {self.prior_exponent}")
        object.__setattr__(self, "prior_exponent", matches[0])
        if self.hq_iters < 1 or self.inner_iters < 1:
            raise InvalidArgumentError("hq_iters and inner_iters must be >= 1")
        if not self.penalty_start > 0:
            raise InvalidArgumentError(f"penalty_start must be > 0, got {self.penalty_start}")
        if self.hq_iters > 1 and not self.penalty_growth > 1.0:
            raise InvalidArgumentError(
                f"penalty_growth must be > 1 so penalties increase, got {self.penalty_growth}")

    @property
    def penalties(self) -> List[float]:
        return [self.penalty_start * self.penalty_growth ** i for i in range(self.hq_iters)]


def _largest_root_half(v: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """
    Candidate minimizer for p = 1/2 and v > 0.

    With w = t^2 the stationarity condition is t^3 - v t + 1/(2 beta) = 0; when it has three
    real roots the largest one is the nonzero local minimum.
    """
    q = 1.0 / (2.0 * beta)
    three_real = 27.0 * q ** 2 < 4.0 * v ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = -(3.0 * q / (2.0 * v)) * np.sqrt(3.0 / v)
        t = 2.0 * np.sqrt(v / 3.0) * np.cos(np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0)
    return np.where(three_real, t ** 2, 0.0)


def _largest_root_two_thirds(v: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """
    Candidate minimizer for p = 2/3 and v > 0.

    With w = t^3 the condition is the quartic t^4 - v t + c = 0, c = 2 / (3 beta). Ferrari's
    resolvent m^3 - c m - v^2/8 = 0 always has a positive root m, and the quartic then
    factors into quadratics; the larger root of t^2 - sqrt(2m) t + m - v sqrt(2m) / (4m) = 0
    is the nonzero local minimum when its discriminant is nonnegative.
    """
    c = 2.0 / (3.0 * beta)
    arg = (3.0 * v ** 2 / (16.0 * c)) * np.sqrt(3.0 / c)
    with np.errstate(invalid="ignore"):
        trig = np.cos(np.arccos(np.minimum(arg, 1.0)) / 3.0)
        hyper = np.cosh(np.arccosh(np.maximum(arg, 1.0)) / 3.0)
    m = 2.0 * np.sqrt(c / 3.0) * np.where(arg <= 1.0, trig, hyper)
    disc = -2.0 * m + v * np.sqrt(2.0) / np.sqrt(m)
    t = (np.sqrt(2.0 * m) + np.sqrt(np.maximum(disc, 0.0))) / 2.0
    return np.where(disc >= 0.0, t ** 3, 0.0)


def lp_prox(value, alpha: float, gamma: float, p: float) -> np.ndarray:
    """
    Elementwise argmin_w (gamma/2)(w - value)^2 + alpha |w|^p for p in {1/2, 2/3, 1, 2}.

    p = 1/2 and 2/3 use closed-form polynomial roots compared against w = 0;
    p = 1 is soft thresholding; p = 2 is linear shrinkage.
    """
    if gamma <= 0 or alpha < 0:
        raise InvalidArgumentError(f"need gamma > 0 and alpha >= 0, got gamma={gamma}, alpha={alpha}")
    v = np.asarray(value, dtype=np.float64)
    if alpha == 0:
        return v.copy()
    if abs(p - 2.0) < 1e-12:
        return gamma * v / (gamma + 2.0 * alpha)
    if abs(p - 1.0) < 1e-12:
        return np.sign(v) * np.maximum(np.abs(v) - alpha / gamma, 0.0)

    # divide through by alpha: |w|^p + (beta/2)(w - v)^2
    beta = gamma / alpha
    magnitude = np.abs(v)
    if abs(p - 0.5) < 1e-12:
        candidate = _largest_root_half(magnitude, beta)
    elif abs(p - 2.0 / 3.0) < 1e-9:
        candidate = _largest_root_two_thirds(magnitude, beta)
    else:
        raise InvalidArgumentError(f"unsupported prior exponent {p}")
    cost_candidate = (beta / 2.0) * (candidate - magnitude) ** 2 + candidate ** p
    cost_zero = (beta / 2.0) * magnitude ** 2
    chosen = np.where((candidate > 0.0) & (cost_candidate < cost_zero), candidate, 0.0)
    return np.sign(v) * chosen


class HyperLaplacianDeconvolver:
    """Half-quadratic deconvolution of single-channel images with a fixed kernel."""

    def __init__(self, ker: KernelF, params: NonBlindParams = NonBlindParams()):
        self.ker = project_simplex(ker)
        self.params = params
        self.violations: List[float] = []

    def x_update(self, y_hat: np.ndarray, k_hat: np.ndarray, cache: SpectrumCache,
                 w: Tuple[np.ndarray, np.ndarray], penalty: float) -> ImageF:
        """Solve (fidelity K*K + penalty grad* grad) x = fidelity K* y + penalty grad* w."""
        shape = y_hat.shape
        lam = self.params.fidelity_weight
        numerator = lam * np.conj(k_hat) * y_hat
        for d, w_d in zip(DIRECTIONS, w):
            numerator = numerator + penalty * np.conj(cache.gradient(d, shape)) * np.fft.fft2(w_d)
        denominator = lam * np.abs(k_hat) ** 2 + penalty * cache.gradient_power(shape)
        return np.real(np.fft.ifft2(numerator / denominator))

    def run(self, y: ImageF) -> ImageF:
        """Deconvolve one channel; the result is clamped to [0, 1]."""
        y = as_image(y, "blurred image")
        cache = SpectrumCache()
        k_hat = cache.kernel(self.ker, y.shape)
        y_hat = np.fft.fft2(y)
        p = self.params
        x = y.copy()
        self.violations = []
        step = 0
        for penalty in p.penalties:
            for _ in range(p.inner_iters):
                w = tuple(lp_prox(gradient(x, d), 1.0, penalty, p.prior_exponent) for d in DIRECTIONS)
                x = self.x_update(y_hat, k_hat, cache, w, penalty)
                check_finite(x, "non-blind estimate", step)
                violation = np.sqrt(sum(np.sum((w_d - gradient(x, d)) ** 2)
                                        for d, w_d in zip(DIRECTIONS, w)))
                self.violations.append(float(violation))
                step += 1
        logger.debug("non-blind deconvolution finished after %d half-quadratic steps", step)
        return np.clip(x, 0.0, 1.0)


def deconvolve(y: np.ndarray, ker: KernelF, params: NonBlindParams = NonBlindParams()) -> np.ndarray:
    """
    Deconvolve a grayscale (H x W) or colour (H x W x C) image with one shared kernel.

    Colour channels are processed independently with identical settings.
    """
    arr = np.asarray(y, dtype=np.float64)
    solver = HyperLaplacianDeconvolver(ker, params)
    if arr.ndim == 2:
        return solver.run(arr)
    if arr.ndim == 3:
        return np.stack([solver.run(arr[..., c]) for c in range(arr.shape[2])], axis=2)
    raise InvalidArgumentError(f"cannot deconvolve an array of shape {arr.shape}")
