from .grid import GridConfig
from .grid import AssetGrid
from .grid import borrowing_limit
from .grid import build_grid
from .egm import EGMConfig
from .egm import Policy
from .egm import egm_solve
from .egm import euler_residuals

__all__ = [
    "GridConfig",
    "AssetGrid",
    "borrowing_limit",
    "build_grid",
    "EGMConfig",
    "Policy",
    "egm_solve",
    "euler_residuals",
]
