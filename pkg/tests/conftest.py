import numpy as np
import pytest

from sl2geo import MetricParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def k2():
    return MetricParams.from_k(2.0)
