import numpy as np
import pytest

from bakerlab.perturb import PerturbationSpec
from bakerlab.qcore import PureState


def random_state(N, rng):
    z = rng.normal(size=1 << N) + 1j * rng.normal(size=1 << N)
    return PureState(N, z / np.linalg.norm(z))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def y_spec():
    return PerturbationSpec.y_rotation_middle(0.2)


@pytest.fixture
def x_spec():
    return PerturbationSpec.x_flip_rightmost()
