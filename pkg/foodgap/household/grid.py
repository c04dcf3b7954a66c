import numpy as np

from ..common import FoodgapBase
from ..common import ConfigError
from ..common import SubsistenceError

BORROWING_MODES = ["zero", "natural"]


class GridConfig(FoodgapBase):
    """asset grid options

    size            number of nodes
    a_max_multiple  top node as a multiple of mean labor income
    curvature       exponential spacing parameter (0 < curvature; larger
                    values put more nodes near the borrowing limit)
    borrowing_mode  "zero" (a' >= 0) or "natural" (subsistence-adjusted
                    natural limit)
    natural_buffer  in natural mode the first node sits this fraction of
                    |a_lo| above the limit, keeping expenditures strictly
                    above the subsistence cost
    tail_mass_tol   stationary mass allowed in the top node
    max_doublings   how many times a_max may be doubled to satisfy the
                    tail-mass check
    """

    def __init__(
        self,
        size: int = 200,
        a_max_multiple: float = 150.0,
        curvature: float = 5.0,
        borrowing_mode: str = "zero",
        natural_buffer: float = 0.01,
        tail_mass_tol: float = 1e-6,
        max_doublings: int = 3,
        _stop_at_defaults: bool = False,
    ):
        self.size = size
        self.a_max_multiple = a_max_multiple
        self.curvature = curvature
        self.borrowing_mode = borrowing_mode
        self.natural_buffer = natural_buffer
        self.tail_mass_tol = tail_mass_tol
        self.max_doublings = max_doublings
        if _stop_at_defaults:
            return
        if self.borrowing_mode not in BORROWING_MODES:
            raise ConfigError(
                "*** ERROR *** the specified borrowing mode [ %s ] is not valid. Valid modes are: %s"
                % (borrowing_mode, ", ".join(BORROWING_MODES))
            )
        if int(size) != size or size < 3:
            raise ConfigError("*** ERROR *** grid size must be an integer >= 3, got [ %s ]" % size)
        if not (a_max_multiple > 0.0 and curvature > 0.0):
            raise ConfigError("*** ERROR *** a_max_multiple and curvature must be > 0")
        if not 0.0 < natural_buffer < 1.0:
            raise ConfigError("*** ERROR *** natural_buffer must be in (0,1)")


class AssetGrid:
    """strictly increasing asset nodes; nodes[0] is the borrowing limit"""

    def __init__(self, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.shape[0] < 2:
            raise ValueError("*** ERROR *** asset grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("*** ERROR *** asset grid nodes must be strictly increasing")
        nodes.setflags(write=False)
        self.nodes = nodes

    @classmethod
    def exponential(cls, a_lo: float, a_max: float, size: int = 200, curvature: float = 5.0):
        """nodes a_lo + (a_max - a_lo) * (exp(curvature*x) - 1) / (exp(curvature) - 1)
        for x evenly spaced on [0, 1]"""
        if not a_max > a_lo:
            raise ValueError("*** ERROR *** a_max [ %s ] must exceed a_lo [ %s ]" % (a_max, a_lo))
        x = np.linspace(0.0, 1.0, int(size))
        span = np.expm1(curvature * x) / np.expm1(curvature)
        nodes = a_lo + (a_max - a_lo) * span
        nodes[0] = a_lo
        nodes[-1] = a_max
        return cls(nodes)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def a_lo(self) -> float:
        return float(self.nodes[0])

    @property
    def a_max(self) -> float:
        return float(self.nodes[-1])

    def with_a_max(self, a_max: float, curvature: float):
        return AssetGrid.exponential(self.a_lo, a_max, self.size, curvature)

    def same_as(self, other) -> bool:
        return self.nodes.shape == other.nodes.shape and np.array_equal(self.nodes, other.nodes)

    def __repr__(self):
        return "AssetGrid(size=%d, a_lo=%g, a_max=%g)" % (self.size, self.a_lo, self.a_max)


def borrowing_limit(prices, theta_min: float, prefs, mode: str = "zero") -> float:
    """lowest admissible asset level

    zero     0
    natural  (w*theta_min - p*f_bar) / (1 - r): the debt a household can
             carry forever while affording subsistence food in the worst
             productivity state; only defined for r > 1 (gross)
    """
    if mode == "zero":
        return 0.0
    if mode != "natural":
        raise ConfigError(
            "*** ERROR *** the specified borrowing mode [ %s ] is not valid. Valid modes are: %s"
            % (mode, ", ".join(BORROWING_MODES))
        )
    income_floor = prices.w * theta_min - prices.p * prefs.f_bar
    if income_floor <= 0.0:
        raise SubsistenceError(
            "*** ERROR *** lowest labor income cannot pay for subsistence food",
            w=prices.w, theta_min=theta_min, p=prices.p, f_bar=prefs.f_bar,
        )
    if prices.r <= 1.0:
        raise ValueError(
            "*** ERROR *** natural borrowing limit needs a positive net return, got r = %s"
            % prices.r
        )
    return income_floor / (1.0 - prices.r)


def build_grid(config: GridConfig, a_lo: float, mean_labor_income: float) -> AssetGrid:
    """grid from the config; in natural mode the first node is lifted off
    the limit by `natural_buffer * |a_lo|`"""
    if config.borrowing_mode == "natural":
        a_lo = a_lo + config.natural_buffer * abs(a_lo)
    a_max = max(a_lo, 0.0) + config.a_max_multiple * mean_labor_income
    return AssetGrid.exponential(a_lo, a_max, config.size, config.curvature)
