from .params import SolverParams, Variant, default_jobs, load_params, read_params_file
from .alternating import OuterStep, ScaleTrace, estimate_scale
from .multiscale import DeblurResult, MultiScaleDeblurrer, deblur_blind

__all__ = [
    'SolverParams',
    'Variant',
    'default_jobs',
    'load_params',
    'read_params_file',
    'OuterStep',
    'ScaleTrace',
    'estimate_scale',
    'DeblurResult',
    'MultiScaleDeblurrer',
    'deblur_blind',
]
