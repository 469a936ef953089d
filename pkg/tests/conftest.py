import numpy as np
import pytest

from squeezebound.discs import DiscSearchConfig
from squeezebound.domain import builtin


@pytest.fixture(scope="session")
def model():
    return builtin("model", k=2)


@pytest.fixture(scope="session")
def herbort():
    return builtin("herbort")


@pytest.fixture(scope="session")
def ball1():
    return builtin("ball", r=1.0)


@pytest.fixture(scope="session")
def ball2():
    return builtin("ball", r=2.0)


@pytest.fixture(scope="session")
def convex():
    return builtin("convex_control")


@pytest.fixture
def cfg():
    return DiscSearchConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
