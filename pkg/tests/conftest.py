"""Shared fixtures: builtin scenario runs are cached per session."""

import pytest

from chilsim.runner import run_scenario
from chilsim.scenario import builtin_cc_50, builtin_cv_90


@pytest.fixture(scope="session")
def cc50_result():
    return run_scenario(builtin_cc_50())


@pytest.fixture(scope="session")
def cv90_result():
    return run_scenario(builtin_cv_90())
