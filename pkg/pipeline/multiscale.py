"""
Multi-scale driver: coarse-to-fine kernel estimation orchestrated with LangGraph.

The graph walks the pyramid: build levels, estimate at the coarsest scale, then
upsample the kernel and re-estimate until the finest scale, and finally restore.
Estimation runs on the gray image multiplied by ``intensity_scale``; restoration
and the returned intermediate image are back on the [0, 1] scale.
"""
import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph

from imaging.errors import InvalidArgumentError
from imaging.kernels import dirac_kernel
from imaging.raster import ImageF, KernelF, to_grayscale
from imaging.resample import build_pyramid, edge_taper, pyramid_kernel_sizes, upsample_kernel
from restoration.hyper_laplacian import NonBlindParams, deconvolve
from .alternating import ScaleTrace, estimate_scale
from .params import SolverParams

logger = logging.getLogger(__name__)


class PyramidState(TypedDict):
    """State carried between the workflow nodes."""
    blurred: ImageF
    target: np.ndarray
    restore: bool
    levels: List[ImageF]
    kernel_sizes: List[int]
    scale: int
    image: Optional[ImageF]
    kernel: Optional[KernelF]
    scale_kernels: List[KernelF]
    traces: List[ScaleTrace]
    restored: Optional[np.ndarray]


@dataclass(frozen=True)
class DeblurResult:
    """Outcome of one blind deblurring run."""
    kernel: KernelF
    intermediate: ImageF
    restored: Optional[np.ndarray]
    energy_traces: List[ScaleTrace]
    scale_kernels: List[KernelF]
    elapsed: float

    def trace_summary(self) -> Dict[str, Any]:
        return {
            "elapsed_seconds": self.elapsed,
            "kernel_size": int(self.kernel.shape[0]),
            "scales": [t.to_dict() for t in self.energy_traces],
        }


class MultiScaleDeblurrer:
    """Coarse-to-fine blind deblurring with a fixed set of solver parameters."""

    def __init__(self, params: SolverParams = SolverParams(),
                 nonblind: NonBlindParams = NonBlindParams()):
        self.params = params
        self.nonblind = nonblind
        self.workflow = self._build_workflow()

    def _build_workflow(self):
        """Build the LangGraph workflow over the pyramid levels."""
        params = self.params

        def pyramid_node(state: PyramidState) -> Dict[str, Any]:
            """Node: build the pyramid and the Dirac start kernel."""
            levels = build_pyramid(state["blurred"], params.scales, params.pyramid_factor)
            sizes = pyramid_kernel_sizes(params.kernel_size, params.scales, params.pyramid_factor)
            for level, size in zip(levels, sizes):
                if size > min(level.shape):
                    raise InvalidArgumentError(
                        f"kernel size {size} exceeds pyramid level {level.shape[1]}x{level.shape[0]}",
                        {"kernel_size": params.kernel_size, "scales": params.scales})
            logger.info("🗻 pyramid: %s, kernel sizes %s",
                        ", ".join(f"{lv.shape[1]}x{lv.shape[0]}" for lv in levels), sizes)
            return {"levels": levels, "kernel_sizes": sizes, "scale": 0,
                    "kernel": dirac_kernel(sizes[0]), "image": None}

        def estimate_node(state: PyramidState) -> Dict[str, Any]:
            """Node: alternating estimation on the current scale."""
            scale = state["scale"]
            k0 = state["kernel"]
            y_s = edge_taper(state["levels"][scale], k0)
            # zero image at the coarsest scale, the tapered blurred level afterwards
            x0 = None if scale == 0 else y_s
            x, k, trace = estimate_scale(y_s, k0, params, x0=x0, scale=scale)
            energies = trace.image_energies
            logger.info("🔍 scale %d/%d: %dx%d image, %dx%d kernel, image energy %.4g -> %.4g",
                        scale + 1, params.scales, y_s.shape[1], y_s.shape[0],
                        k.shape[1], k.shape[0], energies[0], energies[-1])
            return {"image": x, "kernel": k,
                    "scale_kernels": state["scale_kernels"] + [k],
                    "traces": state["traces"] + [trace]}

        def upsample_node(state: PyramidState) -> Dict[str, Any]:
            """Node: move to the next finer scale."""
            scale = state["scale"] + 1
            kernel = upsample_kernel(state["kernel"], state["kernel_sizes"][scale])
            return {"scale": scale, "kernel": kernel}

        def restore_node(state: PyramidState) -> Dict[str, Any]:
            """Node: non-blind restoration with the finest kernel."""
            if not state["restore"]:
                return {"restored": None}
            logger.info("🖼️  restoring %s image with the estimated kernel",
                        "colour" if state["target"].ndim == 3 else "grayscale")
            return {"restored": deconvolve(state["target"], state["kernel"], self.nonblind)}

        def next_scale(state: PyramidState) -> str:
            """Conditional: refine on the next scale or finish."""
            if state["scale"] + 1 < len(state["levels"]):
                return "refine"
            return "finalize"

        workflow = StateGraph(PyramidState)

        workflow.add_node("pyramid", pyramid_node)
        workflow.add_node("estimate", estimate_node)
        workflow.add_node("upsample", upsample_node)
        workflow.add_node("restore", restore_node)

        workflow.set_entry_point("pyramid")
        workflow.add_edge("pyramid", "estimate")
        workflow.add_conditional_edges(
            "estimate",
            next_scale,
            {
                "refine": "upsample",
                "finalize": "restore"
            }
        )
        workflow.add_edge("upsample", "estimate")
        workflow.add_edge("restore", END)

        return workflow.compile()

    def _invoke(self, y: np.ndarray, restore: bool) -> DeblurResult:
        arr = np.asarray(y, dtype=np.float64)
        if arr.ndim not in (2, 3):
            raise InvalidArgumentError(f"cannot deblur an array of shape {arr.shape}")
        gain = self.params.intensity_scale
        start = time.perf_counter()
        initial_state: PyramidState = {
            "blurred": to_grayscale(arr) * gain,
            "target": arr,
            "restore": restore,
            "levels": [],
            "kernel_sizes": [],
            "scale": 0,
            "image": None,
            "kernel": None,
            "scale_kernels": [],
            "traces": [],
            "restored": None,
        }
        # pyramid + S estimates + (S - 1) upsamples + restore, with headroom
        final_state = self.workflow.invoke(
            initial_state, config={"recursion_limit": 2 * self.params.scales + 10})
        elapsed = time.perf_counter() - start
        return DeblurResult(
            kernel=final_state["kernel"],
            intermediate=final_state["image"] / gain,
            restored=final_state["restored"],
            energy_traces=list(final_state["traces"]),
            scale_kernels=list(final_state["scale_kernels"]),
            elapsed=elapsed,
        )

    def estimate(self, y: np.ndarray) -> DeblurResult:
        """Kernel estimation only; ``restored`` is None."""
        return self._invoke(y, restore=False)

    def run(self, y: np.ndarray) -> DeblurResult:
        """Kernel estimation followed by non-blind restoration of ``y`` (grayscale or colour)."""
        result = self._invoke(y, restore=True)
        logger.info("✅ blind deblurring finished in %.2f s", result.elapsed)
        return result


def deblur_blind(y: np.ndarray, params: SolverParams = SolverParams(),
                 nonblind: Optional[NonBlindParams] = None) -> DeblurResult:
    """Estimate the blur kernel of ``y`` and restore it; see :class:`MultiScaleDeblurrer`."""
    return MultiScaleDeblurrer(params, nonblind or NonBlindParams()).run(y)
