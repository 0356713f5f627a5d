import numpy as np
import pytest

from fhefft.fhe import DEFAULT_PARAMS, EXACT_PARAMS, GswScheme


@pytest.fixture(scope="session")
def default_scheme():
    return GswScheme(DEFAULT_PARAMS)


@pytest.fixture(scope="session")
def default_keys(default_scheme):
    return default_scheme.keygen(seed=1)


@pytest.fixture(scope="session")
def exact_scheme():
    return GswScheme(EXACT_PARAMS)


@pytest.fixture(scope="session")
def exact_keys(exact_scheme):
    return exact_scheme.keygen(seed=1)


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
