import numpy as np
import pytest

from nematicflow import Grid, SpectralPlan

TWO_PI = 2.0 * np.pi


@pytest.fixture
def grid16():
    return Grid((16, 16, 16), (TWO_PI, TWO_PI, TWO_PI))


@pytest.fixture
def plan16(grid16):
    return SpectralPlan(grid16)


@pytest.fixture
def grid8():
    return Grid((8, 8, 8), (TWO_PI, TWO_PI, TWO_PI))


@pytest.fixture
def plan8(grid8):
    return SpectralPlan(grid8)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
