"""
Base class for the inner OSAL solvers.
Provides the shared parameter block, split-variable state and divergence checks.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Tuple

import numpy as np

from imaging.errors import InvalidArgumentError, NumericalDivergenceError


class ContinuationMode(str, Enum):
    """Where the c^i continuation factor of an outer iteration is applied."""
    FIDELITY = "fidelity"   # lam / c^i with alpha, beta and gamma fixed
    WEIGHTS = "weights"     # c^i * alpha, c^i * beta with lam and gamma fixed


@dataclass(frozen=True)
class InnerParams:
    """
    Weights for one inner solve.

    ``alpha`` / ``beta`` are the base l0 / l2 weights and ``continuation`` is the c^i factor
    of the current outer iteration. Both modes minimize a positive multiple of
        lam * fidelity + c^i * (alpha * l0 + beta * l2)
    and so share minimizers. In FIDELITY mode the solver sees lam / c^i against a fixed
    threshold (2 alpha / gamma)^(1/2); in WEIGHTS mode it sees lam against a threshold that
    shrinks by c^(1/2) per outer iteration. The penalty ``gamma`` is fixed in both.
    """
    alpha: float
    beta: float
    lam: float
    gamma: float
    continuation: float = 1.0
    iters: int = 10
    mode: ContinuationMode = ContinuationMode.FIDELITY

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise InvalidArgumentError(
                f"regularizer weights must be >= 0, got alpha={self.alpha}, beta={self.beta}")
        if not (self.lam > 0 and self.gamma > 0):
            raise InvalidArgumentError(
                f"fidelity and penalty weights must be > 0, got lam={self.lam}, gamma={self.gamma}")
        if not 0.0 < self.continuation <= 1.0:
            raise InvalidArgumentError(f"continuation must lie in (0, 1], got {self.continuation}")
        if self.iters < 1:
            raise InvalidArgumentError(f"inner iteration count must be >= 1, got {self.iters}")
        try:
            object.__setattr__(self, "mode", ContinuationMode(self.mode))
        except ValueError:
            raise InvalidArgumentError(f"unknown continuation mode {self.mode!r}")

    @property
    def lam_eff(self) -> float:
        if self.mode is ContinuationMode.FIDELITY:
            return self.lam / self.continuation
        return self.lam

    @property
    def alpha_eff(self) -> float:
        if self.mode is ContinuationMode.FIDELITY:
            return self.alpha
        return self.continuation * self.alpha

    @property
    def beta_eff(self) -> float:
        if self.mode is ContinuationMode.FIDELITY:
            return self.beta
        return self.continuation * self.beta

    @property
    def threshold(self) -> float:
        """Hard-threshold level sqrt(2 * alpha_eff / gamma)."""
        return float(np.sqrt(2.0 * self.alpha_eff / self.gamma))

    @property
    def weights(self) -> Tuple[float, float, float]:
        """(lam_eff, alpha_eff, beta_eff) as seen by the solver."""
        return self.lam_eff, self.alpha_eff, self.beta_eff


@dataclass
class SplitState:
    """Auxiliary splits and multipliers of the OSAL loops; all zero at the start of a solve."""
    w_h: Optional[np.ndarray] = None
    w_v: Optional[np.ndarray] = None
    mu_h: Optional[np.ndarray] = None
    mu_v: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    mu_k: Optional[np.ndarray] = None

    @classmethod
    def for_image(cls, shape: Tuple[int, int]) -> "SplitState":
        return cls(w_h=np.zeros(shape), w_v=np.zeros(shape),
                   mu_h=np.zeros(shape), mu_v=np.zeros(shape))

    @classmethod
    def for_kernel(cls, shape: Tuple[int, int]) -> "SplitState":
        return cls(g=np.zeros(shape), mu_k=np.zeros(shape))


class BaseSolver(ABC):
    """Base class for the image and kernel OSAL solvers."""

    def __init__(self, params: InnerParams):
        self.params = params
        self.name = self.__class__.__name__
        self.state: Optional[SplitState] = None

    def _check_finite(self, iteration: int, **arrays: np.ndarray) -> None:
        """Raise NumericalDivergenceError naming the first non-finite array."""
        for label, arr in arrays.items():
            if not np.all(np.isfinite(arr)):
                raise NumericalDivergenceError(
                    f"{self.name}: non-finite values in {label}", iteration=iteration,
                    context={"solver": self.name})

    @abstractmethod
    def solve(self, *args: Any, **kwargs: Any) -> Tuple[np.ndarray, List[float]]:
        """Run the inner loop; return the primal estimate and the per-iteration energy trace."""
        pass
