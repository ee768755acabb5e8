"""
Solver parameters, regularizer variants and layered configuration loading.

Precedence, lowest to highest: built-in defaults, L0DEBLUR_<FIELD> environment
variables (a project .env is loaded first), a JSON params file, explicit overrides.
"""
import dataclasses
import json
import os
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from dotenv import load_dotenv

from imaging.errors import InvalidArgumentError, InvalidConfigError
from restoration.hyper_laplacian import NonBlindParams
from solvers.base_solver import ContinuationMode, InnerParams

# Load .env from project root
project_root = Path(__file__).parent.parent
load_dotenv(dotenv_path=project_root / ".env")

ENV_PREFIX = "L0DEBLUR_"


class Variant(str, Enum):
    """Regularizer variants of the alternating scheme."""
    R1 = "R1"   # l0-l2 on both image gradients and kernel
    R2 = "R2"   # drops the image l2 term
    R3 = "R3"   # additionally drops the kernel l0 term

    @classmethod
    def parse(cls, value: Union[str, "Variant"]) -> "Variant":
        try:
            return cls(str(value.value if isinstance(value, Variant) else value).strip().upper())
        except ValueError:
            raise InvalidConfigError(f"unknown variant {value!r}; expected one of R1, R2, R3")


@dataclass(frozen=True)
class SolverParams:
    """Weights, schedules and sizes of the blind kernel estimation."""
    lam: float = 100.0
    alpha_x: float = 0.25
    beta_x: float = 5.0
    alpha_k: float = 0.25
    beta_k: float = 5.0
    gamma_x: float = 100.0
    gamma_k: float = 1e6
    c_x: float = 2.0 / 3.0
    c_k: float = 4.0 / 5.0
    outer_iters: int = 10
    inner_iters_x: int = 10
    inner_iters_k: int = 10
    scales: int = 4
    kernel_size: int = 27
    variant: Variant = Variant.R1
    pyramid_factor: float = 2.0
    continuation_mode: ContinuationMode = ContinuationMode.FIDELITY
    # gray levels per unit of a [0, 1] image during estimation; the weights above assume 0-255
    intensity_scale: float = 255.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        try:
            object.__setattr__(self, "continuation_mode", ContinuationMode(self.continuation_mode))
        except ValueError:
            raise InvalidArgumentError(
                f"continuation_mode must be fidelity or weights, got {self.continuation_mode!r}")
        for name in ("alpha_x", "beta_x", "alpha_k", "beta_k"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("lam", "gamma_x", "gamma_k", "intensity_scale"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("c_x", "c_k"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidArgumentError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        for name in ("outer_iters", "inner_iters_x", "inner_iters_k", "scales"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise InvalidArgumentError(f"kernel_size must be odd and >= 3, got {self.kernel_size}")
        if not self.pyramid_factor > 1.0:
            raise InvalidArgumentError(f"pyramid_factor must be > 1, got {self.pyramid_factor}")

    def replace(self, **changes: Any) -> "SolverParams":
        return dataclasses.replace(self, **changes)

    def image_params(self, outer_iteration: int) -> InnerParams:
        """Inner weights of the image solve at outer iteration i (continuation c_x^i)."""
        beta = 0.0 if self.variant in (Variant.R2, Variant.R3) else self.beta_x
        return InnerParams(alpha=self.alpha_x, beta=beta, lam=self.lam, gamma=self.gamma_x,
                           continuation=self.c_x ** outer_iteration, iters=self.inner_iters_x,
                           mode=self.continuation_mode)

    def kernel_params(self, outer_iteration: int) -> InnerParams:
        """Inner weights of the kernel solve at outer iteration i (continuation c_k^i)."""
        alpha = 0.0 if self.variant is Variant.R3 else self.alpha_k
        return InnerParams(alpha=alpha, beta=self.beta_k, lam=self.lam, gamma=self.gamma_k,
                           continuation=self.c_k ** outer_iteration, iters=self.inner_iters_k,
                           mode=self.continuation_mode)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["variant"] = self.variant.value
        data["continuation_mode"] = self.continuation_mode.value
        return data


def _coerce(cls, name: str, raw: Any) -> Any:
    """Convert a raw config value to the declared type of ``cls.name``."""
    declared = {f.name: f.type for f in fields(cls)}[name]
    try:
        if declared is Variant:
            return Variant.parse(raw)
        if declared is ContinuationMode:
            return ContinuationMode(str(raw).strip().lower())
        if declared is int:
            if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                raise ValueError(raw)
            return int(float(raw)) if isinstance(raw, str) else int(raw)
        if declared is float:
            if isinstance(raw, bool):
                raise ValueError(raw)
            return float(raw)
    except (TypeError, ValueError):
        raise InvalidConfigError(f"invalid value {raw!r} for {name}")
    return raw


def _field_names(cls) -> Tuple[str, ...]:
    return tuple(f.name for f in fields(cls))


def env_overrides(cls, environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Collect L0DEBLUR_<FIELD> values for the fields of ``cls``."""
    environ = os.environ if environ is None else environ
    found = {}
    for name in _field_names(cls):
        key = ENV_PREFIX + name.upper()
        if key in environ and environ[key] != "":
            found[name] = _coerce(cls, name, environ[key])
    return found


def read_params_file(path: Union[str, Path]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """
    Parse a JSON params file into (solver, nonblind) override dicts.

    Accepts ``{"solver": {...}, "nonblind": {...}}`` or flat solver keys; any key that
    is not a field of the matching dataclass raises InvalidConfigError.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InvalidConfigError(f"params file not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidConfigError(f"params file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise InvalidConfigError(f"params file {path} must hold a JSON object")

    sectioned = set(data) & {"solver", "nonblind"}
    if sectioned:
        unknown_sections = set(data) - {"solver", "nonblind"}
        if unknown_sections:
            raise InvalidConfigError(f"unknown sections in {path}: {sorted(unknown_sections)}")
        solver_raw = data.get("solver") or {}
        nonblind_raw = data.get("nonblind") or {}
    else:
        solver_raw, nonblind_raw = data, {}

    return _checked(SolverParams, solver_raw, path), _checked(NonBlindParams, nonblind_raw, path)


def _checked(cls, raw: Dict[str, Any], source: Any) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise InvalidConfigError(f"section for {cls.__name__} in {source} must be an object")
    unknown = set(raw) - set(_field_names(cls))
    if unknown:
        raise InvalidConfigError(f"unknown {cls.__name__} keys in {source}: {sorted(unknown)}")
    return {name: _coerce(cls, name, value) for name, value in raw.items()}


def _build(cls, layers):
    merged: Dict[str, Any] = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    try:
        return cls(**merged)
    except InvalidConfigError:
        raise
    except InvalidArgumentError as e:
        raise InvalidConfigError(e.message)


def load_params(params_file: Optional[Union[str, Path]] = None,
                solver_overrides: Optional[Dict[str, Any]] = None,
                nonblind_overrides: Optional[Dict[str, Any]] = None,
                environ: Optional[Mapping[str, str]] = None) -> Tuple[SolverParams, NonBlindParams]:
    """
    Resolve SolverParams and NonBlindParams from every configuration layer.

    Override values of ``None`` are ignored so unset CLI flags fall through.
    """
    file_solver: Dict[str, Any] = {}
    file_nonblind: Dict[str, Any] = {}
    if params_file is not None:
        file_solver, file_nonblind = read_params_file(params_file)
    flag_solver = _checked(SolverParams, {k: v for k, v in (solver_overrides or {}).items()
                                          if v is not None}, "overrides")
    flag_nonblind = _checked(NonBlindParams, {k: v for k, v in (nonblind_overrides or {}).items()
                                              if v is not None}, "overrides")
    solver = _build(SolverParams, [env_overrides(SolverParams, environ), file_solver, flag_solver])
    nonblind = _build(NonBlindParams, [env_overrides(NonBlindParams, environ), file_nonblind, flag_nonblind])
    return solver, nonblind


def default_jobs(environ: Optional[Mapping[str, str]] = None) -> int:
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_PREFIX + "JOBS", "")
    if not raw:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise InvalidConfigError(f"{ENV_PREFIX}JOBS must be an integer, got {raw!r}")
    if jobs < 1:
        raise InvalidConfigError(f"{ENV_PREFIX}JOBS must be >= 1, got {jobs}")
    return jobs
