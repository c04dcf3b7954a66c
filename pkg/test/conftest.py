import numpy as np
import pytest

from foodgap.preferences import Preferences
from foodgap.production import Technology
from foodgap.production import prices_from_rate
from foodgap.stochastic import IncomeProcess
from foodgap.stochastic import discretize_ar1
from foodgap.household.grid import AssetGrid
from foodgap.household.grid import GridConfig
from foodgap.core import SolverConfig


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full equilibrium solves (deselect with -m 'not slow')")


@pytest.fixture
def prefs():
    return Preferences()


@pytest.fixture
def tech():
    return Technology()


@pytest.fixture
def two_state_income():
    return IncomeProcess([0.6, 1.4], [[0.8, 0.2], [0.2, 0.8]])


@pytest.fixture
def income():
    return discretize_ar1(0.23, 0.5, 3)


@pytest.fixture
def small_grid():
    return AssetGrid.exponential(0.0, 20.0, 60, 3.0)


@pytest.fixture
def prices(tech):
    return prices_from_rate(tech, 0.02)


@pytest.fixture
def small_options():
    """reduced model that solves in seconds"""
    return {
        "income": {"values": {"n_states": 3, "sigma": 0.5, "n_types": 1, "floor": 0.0}},
        "grid": {"values": {"size": 80, "a_max_multiple": 30.0, "tail_mass_tol": 1e-4}},
        "egm": {"values": {"tol": 1e-8}},
        "solver": {"values": {"dist_tol": 1e-12, "clearing_tol": 1e-5}},
        "general": {"values": {"workers": 1}},
    }


@pytest.fixture
def small_grid_config():
    return GridConfig(size=80, a_max_multiple=30.0, tail_mass_tol=1e-4)


@pytest.fixture
def small_solver_config():
    return SolverConfig(dist_tol=1e-12, clearing_tol=1e-5)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
