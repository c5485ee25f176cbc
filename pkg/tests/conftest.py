import numpy as np
import pytest

from modcone.cone import fixed_cone, orthant

CONE_NAMES = ("orthant2", "wedge2", "pyramid3", "hexcone3")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=CONE_NAMES)
def any_cone(request):
    return fixed_cone(request.param)


@pytest.fixture
def orthant2():
    return orthant(2)


@pytest.fixture
def wedge():
    return fixed_cone("wedge2")
