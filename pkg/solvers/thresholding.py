"""
The l0 proximal map.
"""
from typing import Union

import numpy as np

from imaging.errors import InvalidArgumentError

Number = Union[float, np.ndarray]


def hard_threshold(value: Number, threshold: float) -> Number:
    """
    Keep ``value`` where |value| >= threshold, zero elsewhere (ties are kept).

    This is the exact minimizer of (gamma/2)(w - v)^2 + alpha * [w != 0] for
    threshold = sqrt(2 * alpha / gamma). Works elementwise on arrays.
    """
    if threshold < 0:
        raise InvalidArgumentError(f"threshold must be >= 0, got {threshold}")
    if np.isscalar(value):
        return float(value) if abs(value) >= threshold else 0.0
    arr = np.asarray(value, dtype=np.float64)
    return np.where(np.abs(arr) >= threshold, arr, 0.0)
