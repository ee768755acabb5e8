from imaging.kernels import project_simplex
from .base_solver import BaseSolver, ContinuationMode, InnerParams, SplitState
from .thresholding import hard_threshold
from .image_solver import EnergyTerms, ImageSolver, solve_image
from .kernel_solver import KernelSolver, solve_kernel

__all__ = [
    'BaseSolver',
    'ContinuationMode',
    'InnerParams',
    'SplitState',
    'EnergyTerms',
    'ImageSolver',
    'KernelSolver',
    'hard_threshold',
    'project_simplex',
    'solve_image',
    'solve_kernel',
]
