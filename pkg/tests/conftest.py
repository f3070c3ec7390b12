import numpy as np
import pytest

from fastslow.initial_data import Grid1D, InitialCondition, gaussian
from fastslow.model import ModelParams, validate

STANDARD = dict(k1=1.0, k2=2.0, k3=0.5, a=1.0, b=2.0, c1=0.5, c2=0.5, a3=0.5, b3=0.5, c3=0.25, T=1.0)


def make_params(**overrides):
    values = {**STANDARD, "epsilon": 0.1}
    values.update(overrides)
    return validate(ModelParams(**values))


@pytest.fixture
def params():
    return make_params()


@pytest.fixture
def smooth_ic():
    return InitialCondition(gaussian(1.0, 0.0, 1.0), gaussian(0.2, 0.0, 1.0), gaussian(0.5, 0.0, 1.0))


@pytest.fixture
def wide_grid():
    return Grid1D(-12.0, 12.0, 1024)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
