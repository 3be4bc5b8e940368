import numpy as np
import pytest

from orbgrand_ai.codes import rlc_new


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def rlc84():
    return rlc_new(8, 4, 7)


@pytest.fixture(scope="session")
def rlc128():
    return rlc_new(128, 116, 1)
