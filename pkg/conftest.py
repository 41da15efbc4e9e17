import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from evodg.spatial import ScalarSystem  # noqa: E402
from modules.problems.functions import problem1  # noqa: E402
from modules.temporal.functions import TimeMesh  # noqa: E402


@pytest.fixture
def scalar_ode():
    """u' = 0 with M0 = 1."""
    return ScalarSystem(m0=[[1.0]])


@pytest.fixture
def decay_ode():
    """u' + u = 0."""
    return ScalarSystem(m0=[[1.0]], m1=[[1.0]])


@pytest.fixture
def unit_mesh():
    def make(M=4, q=1, rho=1.0, T=1.0):
        return TimeMesh.uniform(T, M, rho, q)
    return make


@pytest.fixture(scope="session")
def prob1():
    return problem1()


@pytest.fixture(scope="session")
def prob1_small_system(prob1):
    return prob1.spatial_system(8, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
