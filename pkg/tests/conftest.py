import numpy as np
import pytest

from cuspmass import coeffcore


@pytest.fixture(scope="session")
def delta_big():
    return coeffcore.delta_table(100_110)


@pytest.fixture(scope="session")
def f11_big():
    return coeffcore.f11_table(100_110)


@pytest.fixture(scope="session")
def delta_small(delta_big):
    return delta_big.restricted(20_000)


@pytest.fixture(scope="session")
def f11_small(f11_big):
    return f11_big.restricted(20_000)


@pytest.fixture(scope="session")
def bump_h():
    from cuspmass.testfns import default_h

    return default_h()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
