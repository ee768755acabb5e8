from .hyper_laplacian import HyperLaplacianDeconvolver, NonBlindParams, deconvolve, lp_prox

__all__ = [
    'HyperLaplacianDeconvolver',
    'NonBlindParams',
    'deconvolve',
    'lp_prox',
]
