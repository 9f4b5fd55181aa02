import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from dynprice.dp import SolverConfig, solve_bellman  # noqa: E402
from dynprice.model import example_problem  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def example():
    return example_problem()


@pytest.fixture(scope="session")
def example_table(example):
    return solve_bellman(example, SolverConfig(seed=0))


@pytest.fixture(scope="session")
def small_table(example):
    return solve_bellman(example, SolverConfig(K=41, M=41, n_exp=200, refine_iters=8, seed=3))
