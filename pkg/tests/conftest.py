import numpy as np
import pytest

from mpabridge import _backend


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=_backend.available())
def backend(request):
    with _backend.using(request.param):
        yield request.param
