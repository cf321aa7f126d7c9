import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from ultrawigner import CoefficientSequence  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_state(rng):
    def make(n_max):
        alpha = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
        return CoefficientSequence(alpha / np.linalg.norm(alpha))
    return make
