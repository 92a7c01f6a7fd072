import math

import pytest

from hillgreen import Potential, clear_cache


@pytest.fixture(scope="session")
def zero1() -> Potential:
    """a = 0 on [0, 1]; everything has a closed form."""
    return Potential.constant(0.0, 1.0)


@pytest.fixture(scope="session")
def pw2() -> Potential:
    """Step potential on [0, 2]: 0 then 1/10."""
    return Potential.piecewise_constant([0.0, 1.0, 2.0], [0.0, 0.1])


@pytest.fixture(scope="session")
def cos_pi() -> Potential:
    """cos t on [0, pi]; not symmetric about the midpoint."""
    return Potential.cosine(math.pi)


@pytest.fixture(scope="session")
def cos2_pi() -> Potential:
    """cos 2t on [0, pi]; symmetric about the midpoint."""
    return Potential.cosine(math.pi, omega=2.0)


@pytest.fixture(autouse=True, scope="module")
def _fresh_cache():
    clear_cache()
    yield
