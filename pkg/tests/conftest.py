import numpy as np
import pytest

from pseudomeasure import Semigroup, build_generator, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unitary8():
    return Semigroup(build_generator(make_grid(1, 8, 1.0), "laplacian"), "unitary")


@pytest.fixture
def heat8():
    return Semigroup(build_generator(make_grid(1, 8, 1.0), "laplacian"), "heat")
