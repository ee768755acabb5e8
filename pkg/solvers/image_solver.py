"""
Image Solver: l0-l2 sharp-image estimation with a fixed kernel.

Minimizes  lam_eff * ||k * x - y||^2 + alpha_eff * ||grad x||_0 + beta_eff * ||grad x||^2
by splitting w = grad x and alternating hard thresholding on w, an FFT-domain
quadratic solve for x, and a multiplier ascent step.
"""
from typing import List, NamedTuple, Tuple

import numpy as np

from imaging.fourier import SpectrumCache, gradient
from imaging.raster import ImageF, KernelF, as_image, as_kernel
from imaging.errors import InvalidArgumentError
from .base_solver import BaseSolver, InnerParams, SplitState
from .thresholding import hard_threshold


class EnergyTerms(NamedTuple):
    """Unweighted pieces of a solver energy so it can be re-weighted later."""
    fidelity: float
    l0: float
    l2: float

    def total(self, lam: float, alpha: float, beta: float) -> float:
        return lam * self.fidelity + alpha * self.l0 + beta * self.l2


class ImageSolver(BaseSolver):
    """OSAL solver for the sharp image given the current kernel."""

    def __init__(self, y: ImageF, ker: KernelF, params: InnerParams):
        super().__init__(params)
        self.y = as_image(y, "blurred image")
        self.ker = as_kernel(ker)
        if self.ker.shape[0] > min(self.y.shape):
            raise InvalidArgumentError(
                f"kernel size {self.ker.shape[0]} exceeds image size {self.y.shape[1]}x{self.y.shape[0]}")
        shape = self.y.shape
        self.cache = SpectrumCache()
        self.k_hat = self.cache.kernel(self.ker, shape)
        self.gh_hat = self.cache.gradient("h", shape)
        self.gv_hat = self.cache.gradient("v", shape)
        p = self.params
        self.data_term = p.lam_eff * np.conj(self.k_hat) * np.fft.fft2(self.y)
        self.denominator = (p.lam_eff * np.abs(self.k_hat) ** 2
                            + (p.beta_eff + p.gamma / 2.0) * self.cache.gradient_power(shape))
        self.terms: List[EnergyTerms] = []

    def w_update(self, x: ImageF, mu_h: np.ndarray, mu_v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        gamma = self.params.gamma
        threshold = self.params.threshold
        w_h = hard_threshold(gradient(x, "h") + mu_h / gamma, threshold)
        w_v = hard_threshold(gradient(x, "v") + mu_v / gamma, threshold)
        return w_h, w_v

    def x_update(self, w_h: np.ndarray, w_v: np.ndarray,
                 mu_h: np.ndarray, mu_v: np.ndarray) -> ImageF:
        """
        Solve (lam_eff K*K + (beta_eff + gamma/2) grad* grad) x = lam_eff K* y + (gamma/2) grad* (w - mu/gamma)
        as a per-frequency division.
        """
        gamma = self.params.gamma
        split_h = np.fft.fft2(w_h - mu_h / gamma)
        split_v = np.fft.fft2(w_v - mu_v / gamma)
        rhs = self.data_term + (gamma / 2.0) * (np.conj(self.gh_hat) * split_h
                                                + np.conj(self.gv_hat) * split_v)
        return np.real(np.fft.ifft2(rhs / self.denominator))

    def energy_terms(self, x: ImageF, w_h: np.ndarray, w_v: np.ndarray) -> EnergyTerms:
        """Fidelity, l0 count (taken on the split w) and l2 sum of the gradients."""
        residual = np.real(np.fft.ifft2(np.fft.fft2(x) * self.k_hat)) - self.y
        grad_h = gradient(x, "h")
        grad_v = gradient(x, "v")
        return EnergyTerms(
            fidelity=float(np.sum(residual ** 2)),
            l0=float(np.count_nonzero(w_h) + np.count_nonzero(w_v)),
            l2=float(np.sum(grad_h ** 2) + np.sum(grad_v ** 2)),
        )

    def energy(self, x: ImageF, w_h: np.ndarray, w_v: np.ndarray) -> float:
        p = self.params
        return self.energy_terms(x, w_h, w_v).total(*p.weights)

    def solve(self, init_x: ImageF) -> Tuple[ImageF, List[float]]:
        """
        Run ``params.iters`` inner iterations from ``init_x``.

        Returns:
            The final image and the energy after every inner iteration.
        """
        x = as_image(init_x, "initial image")
        if x.shape != self.y.shape:
            raise InvalidArgumentError(
                f"initial image shape {x.shape} does not match blurred image {self.y.shape}")
        self.state = SplitState.for_image(x.shape)
        state = self.state
        gamma = self.params.gamma
        trace: List[float] = []
        self.terms = []
        for iteration in range(self.params.iters):
            state.w_h, state.w_v = self.w_update(x, state.mu_h, state.mu_v)
            x = self.x_update(state.w_h, state.w_v, state.mu_h, state.mu_v)
            state.mu_h = state.mu_h + gamma * (gradient(x, "h") - state.w_h)
            state.mu_v = state.mu_v + gamma * (gradient(x, "v") - state.w_v)
            self._check_finite(iteration, x=x, mu_h=state.mu_h, mu_v=state.mu_v)
            terms = self.energy_terms(x, state.w_h, state.w_v)
            self.terms.append(terms)
            trace.append(terms.total(*self.params.weights))
        return x, trace


def solve_image(y: ImageF, ker: KernelF, params: InnerParams,
                init_x: ImageF) -> Tuple[ImageF, List[float]]:
    """Estimate the sharp image for a fixed kernel; see :class:`ImageSolver`."""
    return ImageSolver(y, ker, params).solve(init_x)
