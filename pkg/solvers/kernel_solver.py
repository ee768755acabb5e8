"""
Kernel Solver: l0-l2 blur-kernel estimation with a fixed sharp image.

Works in the gradient domain, y_d = grad_d y and x_d = grad_d x for d in {h, v}:
    lam_eff * sum_d ||x_d * k - y_d||^2 + alpha_eff * ||k||_0 + beta_eff * ||k||^2
The kernel lives on the full image grid during the loop and is cropped to its
window and projected onto C at the end.
"""
from typing import List, Tuple

import numpy as np

from imaging.errors import InvalidArgumentError
from imaging.fourier import DIRECTIONS, gradient
from imaging.kernels import crop_kernel, embed_kernel, project_simplex
from imaging.raster import ImageF, KernelF, as_image, as_kernel
from .base_solver import BaseSolver, InnerParams, SplitState
from .image_solver import EnergyTerms
from .thresholding import hard_threshold


class KernelSolver(BaseSolver):
    """OSAL solver for the kernel given the current sharp image."""

    def __init__(self, x: ImageF, y: ImageF, size: int, params: InnerParams):
        super().__init__(params)
        self.x = as_image(x, "sharp image")
        self.y = as_image(y, "blurred image")
        if self.x.shape != self.y.shape:
            raise InvalidArgumentError(
                f"sharp image {self.x.shape} and blurred image {self.y.shape} differ in shape")
        if size < 1 or size % 2 == 0:
            raise InvalidArgumentError(f"kernel size must be odd, got {size}")
        if size > min(self.y.shape):
            raise InvalidArgumentError(f"kernel size {size} exceeds image size {self.y.shape}")
        self.size = size
        self.x_hat = {d: np.fft.fft2(gradient(self.x, d)) for d in DIRECTIONS}
        self.y_grad = {d: gradient(self.y, d) for d in DIRECTIONS}
        y_hat = {d: np.fft.fft2(self.y_grad[d]) for d in DIRECTIONS}
        p = self.params
        self.data_term = p.lam_eff * sum(np.conj(self.x_hat[d]) * y_hat[d] for d in DIRECTIONS)
        self.denominator = (p.lam_eff * sum(np.abs(self.x_hat[d]) ** 2 for d in DIRECTIONS)
                            + p.beta_eff + p.gamma / 2.0)
        self.terms: List[EnergyTerms] = []

    def g_update(self, k_full: np.ndarray, mu_k: np.ndarray) -> np.ndarray:
        return hard_threshold(k_full + mu_k / self.params.gamma, self.params.threshold)

    def k_update(self, g: np.ndarray, mu_k: np.ndarray) -> np.ndarray:
        """
        Solve (lam_eff sum_d X_d* X_d + (beta_eff + gamma/2) I) k = lam_eff sum_d X_d* y_d + (gamma/2)(g - mu/gamma)
        on the full grid.
        """
        gamma = self.params.gamma
        rhs = self.data_term + (gamma / 2.0) * np.fft.fft2(g - mu_k / gamma)
        return np.real(np.fft.ifft2(rhs / self.denominator))

    def energy_terms(self, k_full: np.ndarray, g: np.ndarray) -> EnergyTerms:
        k_hat = np.fft.fft2(k_full)
        fidelity = 0.0
        for d in DIRECTIONS:
            residual = np.real(np.fft.ifft2(self.x_hat[d] * k_hat)) - self.y_grad[d]
            fidelity += float(np.sum(residual ** 2))
        return EnergyTerms(fidelity=fidelity,
                           l0=float(np.count_nonzero(g)),
                           l2=float(np.sum(k_full ** 2)))

    def solve(self, init_k: KernelF) -> Tuple[KernelF, List[float]]:
        """
        Run ``params.iters`` inner iterations from ``init_k``.

        Returns:
            The cropped, projected kernel and the energy after every inner iteration.
        """
        init_k = as_kernel(init_k, "initial kernel")
        if init_k.shape[0] != self.size:
            raise InvalidArgumentError(
                f"initial kernel size {init_k.shape[0]} does not match requested size {self.size}")
        k_full = embed_kernel(init_k, self.y.shape)
        self.state = SplitState.for_kernel(self.y.shape)
        state = self.state
        gamma = self.params.gamma
        trace: List[float] = []
        self.terms = []
        for iteration in range(self.params.iters):
            state.g = self.g_update(k_full, state.mu_k)
            k_full = self.k_update(state.g, state.mu_k)
            state.mu_k = state.mu_k + gamma * (k_full - state.g)
            self._check_finite(iteration, k=k_full, mu_k=state.mu_k)
            terms = self.energy_terms(k_full, state.g)
            self.terms.append(terms)
            trace.append(terms.total(*self.params.weights))
        return project_simplex(crop_kernel(k_full, self.size)), trace


def solve_kernel(x: ImageF, y: ImageF, size: int, params: InnerParams,
                 init_k: KernelF) -> Tuple[KernelF, List[float]]:
    """Estimate the kernel for a fixed sharp image; see :class:`KernelSolver`."""
    return KernelSolver(x, y, size, params).solve(init_k)
