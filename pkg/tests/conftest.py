import numpy as np
import pytest

from metastab import quartic_double_well


@pytest.fixture
def quartic():
    return quartic_double_well()


@pytest.fixture
def rng():
    return np.random.default_rng(20200115)
