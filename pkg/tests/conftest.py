import numpy as np
import pytest

from seamforge import RasterImage


def make_image(arr, bit_depth=8) -> RasterImage:
    return RasterImage(np.asarray(arr, dtype=np.float64), bit_depth=bit_depth)


def random_image(rng, height, width, channels=1, bit_depth=8) -> RasterImage:
    return RasterImage(rng.random((height, width, channels)), bit_depth=bit_depth)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
