from .errors import (
    DeblurError,
    DegenerateKernelError,
    ImageIOError,
    InvalidArgumentError,
    InvalidConfigError,
    NumericalDivergenceError,
    PyramidTooDeepError,
)
from .raster import ImageF, KernelF, Spectrum, as_image, as_kernel, circular_shift, to_grayscale
from .kernels import dirac_kernel, in_constraint_set, pad_kernel, project_simplex
from .fourier import (
    SpectrumCache,
    apply_transfer,
    convolve_circular,
    gradient,
    gradient_adjoint,
    transfer_function,
)
from .resample import (
    build_pyramid,
    downsample,
    edge_taper,
    pyramid_kernel_sizes,
    upsample_kernel,
)

__all__ = [
    'DeblurError',
    'DegenerateKernelError',
    'ImageIOError',
    'InvalidArgumentError',
    'InvalidConfigError',
    'NumericalDivergenceError',
    'PyramidTooDeepError',
    'ImageF',
    'KernelF',
    'Spectrum',
    'as_image',
    'as_kernel',
    'circular_shift',
    'to_grayscale',
    'dirac_kernel',
    'in_constraint_set',
    'pad_kernel',
    'project_simplex',
    'SpectrumCache',
    'apply_transfer',
    'convolve_circular',
    'gradient',
    'gradient_adjoint',
    'transfer_function',
    'build_pyramid',
    'downsample',
    'edge_taper',
    'pyramid_kernel_sizes',
    'upsample_kernel',
]
