from . import inequality
from . import welfare
from .inequality import gini
from .inequality import ratio_8020
from .inequality import wealthless_share
from .welfare import DecileTable
from .welfare import decile_table
from .welfare import income_decomposition
from .welfare import pe_incidence
from .welfare import engel_approximation
from .welfare import food_share_curve

__all__ = [
    "inequality",
    "welfare",
    "gini",
    "ratio_8020",
    "wealthless_share",
    "DecileTable",
    "decile_table",
    "income_decomposition",
    "pe_incidence",
    "engel_approximation",
    "food_share_curve",
]
