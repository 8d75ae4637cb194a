import numpy as np
import pytest

from anilap.geometry import Anisotropy, rect
from anilap.grids import TensorGrid
from anilap.kernels import AxesKernel


@pytest.fixture
def aniso():
    return Anisotropy((1.5, 0.5))


@pytest.fixture
def kernel(aniso):
    return AxesKernel(aniso)


@pytest.fixture
def grid(aniso):
    return TensorGrid.for_rect(aniso, rect(aniso, (0.0, 0.0), 1.0), 33,
                               pad_cells=8)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
