import numpy as np
import pytest

from lingrowth.density import make_area_density, make_mu_density, normalize


@pytest.fixture(scope="session")
def area():
    return normalize(make_area_density())


@pytest.fixture(scope="session")
def mu2():
    return normalize(make_mu_density(2.0))


@pytest.fixture(scope="session")
def mu3():
    return normalize(make_mu_density(3.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
