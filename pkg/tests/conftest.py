import numpy as np
import pytest

from magsphere.core import cot_potential, identical_params


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def params():
    return identical_params(2.5)


@pytest.fixture
def V(params):
    return cot_potential(params)


def random_states(rng, n, q_range=(0.3, 2.8), scale=1.0):
    """n random reduced phase-space points as (n, 5) array."""
    out = np.empty((n, 5))
    out[:, [0, 1, 2, 4]] = rng.uniform(-scale, scale, (n, 4))
    out[:, 3] = rng.uniform(*q_range, n)
    return out
