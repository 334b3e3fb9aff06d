import numpy as np
import pytest

from onticsim import build_frame


@pytest.fixture(scope="session")
def frame():
    return build_frame()


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
