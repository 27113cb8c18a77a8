import numpy as np
import pytest

from qglab.services.spectral import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid():
    return GridSpec(32, 32, 32)


@pytest.fixture
def slab_grid():
    """Slicewise grid wide enough for λ = 26 waves of the 3D families."""
    return GridSpec(48, 48, 64, "slicewise")


@pytest.fixture
def planar_grid():
    return GridSpec(256, 256, 2, "slicewise")
