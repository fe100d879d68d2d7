import numpy as np
import pytest

from tailband import SortedSample


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def one_to_ten():
    return SortedSample(np.arange(1.0, 11.0))


@pytest.fixture
def exp_powers():
    """Values {1, e, e^2, e^3}."""
    return SortedSample(np.exp(np.arange(4.0)))
