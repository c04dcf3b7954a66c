from . import common
from . import preferences
from . import stochastic
from . import production
from . import household
from . import distribution
from . import analysis
from . import core
from . import storage
from .preferences import Preferences
from .production import Technology
from .production import ClimateScenario
from .stochastic import IncomeConfig
from .core import SteadyStateSolver
from .core import solve_steady_state
from .core import compare
from .core import compare_many

__all__ = [
    "common",
    "preferences",
    "stochastic",
    "production",
    "household",
    "distribution",
    "analysis",
    "core",
    "storage",
    "Preferences",
    "Technology",
    "ClimateScenario",
    "IncomeConfig",
    "SteadyStateSolver",
    "solve_steady_state",
    "compare",
    "compare_many",
]
