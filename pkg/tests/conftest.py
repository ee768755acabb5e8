"""Shared fixtures and the slow-test gate."""
import os
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import ndimage

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from evaluation.synthetic import make_trajectory_kernel  # noqa: E402


def pytest_collection_modifyitems(config, items):
    if os.environ.get("L0DEBLUR_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set L0DEBLUR_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def smooth_image():
    """64x64 piecewise-smooth image in [0.1, 0.9]."""
    noise = np.random.default_rng(7).standard_normal((64, 64))
    field = ndimage.gaussian_filter(noise, sigma=4.0, mode="wrap")
    field = np.tanh(field / field.std() * 2.0)
    return 0.1 + 0.8 * (field - field.min()) / (field.max() - field.min())


@pytest.fixture
def motion_kernel():
    return make_trajectory_kernel(7, 4.0, 0.8, seed=5)
