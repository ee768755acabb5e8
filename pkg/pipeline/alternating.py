"""
Alternating image / kernel estimation at a single pyramid scale.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from imaging.errors import DeblurError, InvalidArgumentError
from imaging.kernels import project_simplex
from imaging.raster import ImageF, KernelF, as_image, as_kernel
from solvers.image_solver import EnergyTerms, ImageSolver
from solvers.kernel_solver import KernelSolver
from .params import SolverParams

logger = logging.getLogger(__name__)


@dataclass
class OuterStep:
    """Energies of one outer iteration, at that iteration's own weights."""
    iteration: int
    image_energy: float
    kernel_energy: float
    image_terms: EnergyTerms
    kernel_terms: EnergyTerms
    image_trace: List[float] = field(default_factory=list)
    kernel_trace: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "image_energy": self.image_energy,
            "kernel_energy": self.kernel_energy,
            "image_terms": self.image_terms._asdict(),
            "kernel_terms": self.kernel_terms._asdict(),
            "image_trace": list(self.image_trace),
            "kernel_trace": list(self.kernel_trace),
        }


@dataclass
class ScaleTrace:
    """Per-scale record of the outer loop."""
    scale: int
    shape: Tuple[int, int]
    kernel_size: int
    steps: List[OuterStep] = field(default_factory=list)
    # (lam_eff, alpha_eff, beta_eff) of the last image solve
    final_image_weights: Tuple[float, float, float] = (1.0, 0.0, 0.0)

    @property
    def image_energies(self) -> List[float]:
        return [s.image_energy for s in self.steps]

    @property
    def kernel_energies(self) -> List[float]:
        return [s.kernel_energy for s in self.steps]

    def common_image_energies(self) -> List[float]:
        """Image energies of every outer iteration re-weighted with the last iteration's weights."""
        lam, alpha, beta = self.final_image_weights
        return [s.image_terms.total(lam, alpha, beta) for s in self.steps]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scale": self.scale,
            "shape": list(self.shape),
            "kernel_size": self.kernel_size,
            "image_energies": self.image_energies,
            "kernel_energies": self.kernel_energies,
            "common_image_energies": self.common_image_energies(),
            "steps": [s.to_dict() for s in self.steps],
        }


def estimate_scale(y_s: ImageF, k0: KernelF, params: SolverParams,
                   x0: Optional[ImageF] = None, scale: int = 0) -> Tuple[ImageF, KernelF, ScaleTrace]:
    """
    Run ``params.outer_iters`` alternating image / kernel solves on one scale.

    Args:
        y_s: Edge-tapered blurred image of this scale
        k0: Initial kernel; its size is the kernel size of this scale
        params: Solver parameters; weights follow the continuation schedule
        x0: Initial sharp image, zeros when omitted
        scale: Scale index, only used for logging and error context

    Returns:
        The final sharp image, the projected kernel and the scale trace
    """
    y_s = as_image(y_s, "blurred image")
    k = project_simplex(as_kernel(k0, "initial kernel"))
    size = k.shape[0]
    if x0 is None:
        x = np.zeros_like(y_s)
    else:
        x = as_image(x0, "initial image")
        if x.shape != y_s.shape:
            raise InvalidArgumentError(
                f"initial image shape {x.shape} does not match blurred image {y_s.shape}")

    trace = ScaleTrace(scale=scale, shape=y_s.shape, kernel_size=size)
    for i in range(params.outer_iters):
        image_params = params.image_params(i)
        kernel_params = params.kernel_params(i)
        try:
            image_solver = ImageSolver(y_s, k, image_params)
            x, image_trace = image_solver.solve(x)
            kernel_solver = KernelSolver(x, y_s, size, kernel_params)
            k, kernel_trace = kernel_solver.solve(k)
        except DeblurError as e:
            raise e.with_context(scale=scale, outer_iteration=i)

        trace.steps.append(OuterStep(
            iteration=i,
            image_energy=image_trace[-1],
            kernel_energy=kernel_trace[-1],
            image_terms=image_solver.terms[-1],
            kernel_terms=kernel_solver.terms[-1],
            image_trace=image_trace,
            kernel_trace=kernel_trace,
        ))
        trace.final_image_weights = image_params.weights
        logger.debug("scale %d outer %d: image energy %.6g, kernel energy %.6g",
                     scale, i, image_trace[-1], kernel_trace[-1])
    return x, k, trace
