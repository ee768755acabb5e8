"""Tests for solver parameters, configuration layering and the blind deblurring pipeline."""
import json

import numpy as np
import pytest

from evaluation.metrics import psnr
from evaluation.synthetic import make_test_image
from imaging.errors import InvalidArgumentError, InvalidConfigError, NumericalDivergenceError, PyramidTooDeepError
from imaging.fourier import convolve_circular
from imaging.kernels import dirac_kernel, in_constraint_set
from imaging.resample import pyramid_kernel_sizes
from pipeline import MultiScaleDeblurrer, SolverParams, Variant, deblur_blind, default_jobs, estimate_scale, load_params
from pipeline.params import read_params_file
from restoration.hyper_laplacian import NonBlindParams
from solvers.image_solver import ImageSolver


TINY = dict(kernel_size=7, scales=2, outer_iters=2, inner_iters_x=2, inner_iters_k=2)


@pytest.fixture
def blurred(smooth_image, motion_kernel):
    return convolve_circular(smooth_image, motion_kernel)


def test_default_parameters():
    params = SolverParams()
    assert (params.lam, params.alpha_x, params.beta_x) == (100.0, 0.25, 5.0)
    assert (params.alpha_k, params.beta_k) == (0.25, 5.0)
    assert (params.gamma_x, params.gamma_k) == (100.0, 1e6)
    assert params.c_x == pytest.approx(2 / 3) and params.c_k == pytest.approx(0.8)
    assert (params.outer_iters, params.inner_iters_x, params.inner_iters_k) == (10, 10, 10)
    assert (params.scales, params.kernel_size) == (4, 27)
    assert params.variant is Variant.R1
    assert params.to_dict()["variant"] == "R1"
    assert params.to_dict()["continuation_mode"] == "fidelity"
    assert params.intensity_scale == 255.0


@pytest.mark.parametrize("changes", [
    {"kernel_size": 8},
    {"kernel_size": 1},
    {"c_x": 1.0},
    {"c_k": 0.0},
    {"lam": 0.0},
    {"alpha_x": -0.1},
    {"outer_iters": 0},
    {"pyramid_factor": 1.0},
    {"continuation_mode": "sideways"},
    {"intensity_scale": 0.0},
])
def test_invalid_parameters_rejected(changes):
    with pytest.raises(InvalidArgumentError):
        SolverParams(**changes)


def test_variants_drop_their_terms():
    r1 = SolverParams()
    r2 = SolverParams(variant="r2")
    r3 = SolverParams(variant=Variant.R3)
    assert r1.image_params(0).beta == 5.0 and r1.kernel_params(0).alpha == 0.25
    assert r2.image_params(0).beta == 0.0 and r2.kernel_params(0).alpha == 0.25
    assert r3.image_params(0).beta == 0.0 and r3.kernel_params(0).alpha == 0.0
    assert r3.kernel_params(0).beta == 5.0
    with pytest.raises(InvalidConfigError):
        Variant.parse("R4")


def test_regularizer_weights_strictly_decrease_relative_to_fidelity():
    params = SolverParams()
    scales = [p.alpha_eff / p.lam_eff for p in map(params.image_params, range(10))]
    assert all(b < a for a, b in zip(scales, scales[1:]))


def test_config_precedence(tmp_path):
    environ = {"L0DEBLUR_LAM": "50", "L0DEBLUR_SCALES": "3", "L0DEBLUR_PRIOR_EXPONENT": "0.5"}
    params_file = tmp_path / "params.json"
    params_file.write_text(json.dumps({"solver": {"lam": 60}, "nonblind": {"fidelity_weight": 500}}))

    solver, nonblind = load_params(environ=environ)
    assert solver.lam == 50.0 and solver.scales == 3
    assert nonblind.prior_exponent == 0.5

    solver, nonblind = load_params(params_file, environ=environ)
    assert solver.lam == 60.0 and solver.scales == 3
    assert nonblind.fidelity_weight == 500.0 and nonblind.prior_exponent == 0.5

    solver, _ = load_params(params_file, solver_overrides={"lam": 70.0, "scales": None}, environ=environ)
    assert solver.lam == 70.0 and solver.scales == 3


def test_flat_params_file(tmp_path):
    params_file = tmp_path / "flat.json"
    params_file.write_text(json.dumps({"outer_iters": 3, "variant": "R2", "continuation_mode": "weights"}))
    solver, nonblind = load_params(params_file, environ={})
    assert solver.outer_iters == 3
    assert solver.variant is Variant.R2
    assert solver.continuation_mode.value == "weights"
    assert nonblind == NonBlindParams()


@pytest.mark.parametrize("content", [
    {"solver": {"lamda": 1.0}},
    {"solver": {}, "extra": {}},
    {"kernel_size": 8},
    {"outer_iters": 2.5},
    [1, 2, 3],
])
def test_bad_params_file_is_a_config_error(tmp_path, content):
    params_file = tmp_path / "bad.json"
    params_file.write_text(json.dumps(content))
    with pytest.raises(InvalidConfigError) as info:
        load_params(params_file, environ={})
    assert info.value.exit_code == 2


def test_unreadable_params_file(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InvalidConfigError):
        read_params_file(broken)
    with pytest.raises(InvalidConfigError):
        read_params_file(tmp_path / "missing.json")


def test_bad_environment_value():
    with pytest.raises(InvalidConfigError):
        load_params(environ={"L0DEBLUR_SCALES": "many"})


def test_default_jobs():
    assert default_jobs({}) == 1
    assert default_jobs({"L0DEBLUR_JOBS": "3"}) == 3
    with pytest.raises(InvalidConfigError):
        default_jobs({"L0DEBLUR_JOBS": "0"})


def test_estimate_scale_trace_and_constraints(blurred):
    params = SolverParams(**TINY)
    x, k, trace = estimate_scale(blurred, dirac_kernel(7), params)
    assert x.shape == blurred.shape
    assert k.shape == (7, 7)
    assert in_constraint_set(k)
    assert len(trace.steps) == 2
    assert all(len(s.image_trace) == 2 and len(s.kernel_trace) == 2 for s in trace.steps)
    assert len(trace.common_image_energies()) == 2
    assert trace.final_image_weights == params.image_params(1).weights
    assert json.dumps(trace.to_dict())


def test_sharp_input_keeps_kernel_centered(smooth_image):
    params = SolverParams(kernel_size=7, outer_iters=3, inner_iters_x=3, inner_iters_k=3)
    _, k, _ = estimate_scale(smooth_image, dirac_kernel(7), params)
    assert np.unravel_index(np.argmax(k), k.shape) == (3, 3)


def test_estimate_scale_rejects_mismatched_start(blurred):
    with pytest.raises(InvalidArgumentError):
        estimate_scale(blurred, dirac_kernel(7), SolverParams(**TINY), x0=np.zeros((10, 10)))


def test_divergence_carries_scale_context(blurred, monkeypatch):
    def diverge(self, init_x):
        raise NumericalDivergenceError("non-finite values in x", iteration=1)

    monkeypatch.setattr(ImageSolver, "solve", diverge)
    with pytest.raises(NumericalDivergenceError) as info:
        estimate_scale(blurred, dirac_kernel(7), SolverParams(**TINY), scale=2)
    assert info.value.context["scale"] == 2
    assert info.value.context["outer_iteration"] == 0
    assert info.value.exit_code == 3


def test_multiscale_run(blurred):
    params = SolverParams(**TINY)
    result = MultiScaleDeblurrer(params).run(blurred)
    assert [k.shape[0] for k in result.scale_kernels] == pyramid_kernel_sizes(7, 2)
    assert all(in_constraint_set(k) for k in result.scale_kernels)
    assert np.array_equal(result.kernel, result.scale_kernels[-1])
    assert result.intermediate.shape == blurred.shape
    assert result.restored.shape == blurred.shape
    assert 0.0 <= result.restored.min() and result.restored.max() <= 1.0
    assert [t.shape for t in result.energy_traces] == [(32, 32), (64, 64)]
    assert result.elapsed >= 0
    assert json.dumps(result.trace_summary())


def test_multiscale_is_deterministic(blurred):
    params = SolverParams(**TINY)
    first = MultiScaleDeblurrer(params).estimate(blurred)
    second = MultiScaleDeblurrer(params).estimate(blurred)
    assert first.restored is None
    assert np.array_equal(first.kernel, second.kernel)


def test_unblurred_input_is_restored_almost_exactly():
    sharp = make_test_image("shapes")
    result = deblur_blind(sharp, SolverParams(kernel_size=13))
    assert np.unravel_index(np.argmax(result.kernel), result.kernel.shape) == (6, 6)
    assert psnr(result.restored, sharp) >= 40.0
    # the intermediate image is reported on the input scale
    assert np.abs(result.intermediate - sharp).mean() < 0.1


def test_colour_input_restores_every_channel(blurred):
    colour = np.stack([blurred, 0.5 * blurred, 0.25 + 0.5 * blurred], axis=2)
    result = MultiScaleDeblurrer(SolverParams(**TINY)).run(colour)
    assert result.intermediate.shape == blurred.shape
    assert result.restored.shape == colour.shape
    assert in_constraint_set(result.kernel)


def test_pyramid_too_deep_is_reported(blurred):
    with pytest.raises(PyramidTooDeepError):
        MultiScaleDeblurrer(SolverParams(kernel_size=7, scales=4)).estimate(blurred)


def test_kernel_larger_than_image(rng):
    with pytest.raises(InvalidArgumentError):
        MultiScaleDeblurrer(SolverParams(kernel_size=25, scales=1)).estimate(rng.random((24, 24)))


@pytest.mark.slow
def test_energy_decreases_over_outer_iterations_on_every_scale(blurred):
    params = SolverParams(kernel_size=7, scales=3)
    result = MultiScaleDeblurrer(params).estimate(blurred)
    for trace in result.energy_traces:
        energies = trace.common_image_energies()
        assert len(energies) == params.outer_iters
        assert energies[-1] <= energies[0]
