"""
Two-sector technology. Both sectors use Cobb-Douglas technology with the same
capital share, capital and labor move freely between them, so both operate at
the common capital-labor ratio `k` and the food price equals the ratio of
sector productivities (the agricultural productivity gap).

Climate damages scale the sector productivities down:
    a_f -> (1 - xi_f) * a_f        a_c -> (1 - xi_c) * a_c
"""

import logging
from typing import NamedTuple

import numpy as np
import pandas as pd

from .common import FoodgapBase
from .common import ConfigError
from .common import SubsistenceError
from .common import get_datafile

logger = logging.getLogger(__name__)

REGIONAL_DAMAGES_FILE = "regional_damages.csv"
REGIONAL_COLUMNS = [
    "region",
    "loss_baseline_pct",
    "loss_optimistic_pct",
    "loss_pessimistic_pct",
    "population_share",
]


class Technology(FoodgapBase):
    """production parameters

    alpha  capital share (both sectors)
    delta  depreciation rate
    a_c    non-food TFP (normalized to one in the undamaged economy)
    g_apg  agricultural productivity gap a_c / a_f

    `a_f` is derived from the gap so that the two can never disagree.
    """

    def __init__(
        self,
        alpha: float = 0.36,
        delta: float = 0.08,
        a_c: float = 1.0,
        g_apg: float = 2.49,
        _stop_at_defaults: bool = False,
    ):
        self.alpha = alpha
        self.delta = delta
        self.a_c = a_c
        self.g_apg = g_apg
        if _stop_at_defaults:
            return
        if not 0.0 < alpha < 1.0:
            raise ConfigError("*** ERROR *** alpha must be in (0,1), got [ %s ]" % alpha)
        if not 0.0 < delta < 1.0:
            raise ConfigError("*** ERROR *** delta must be in (0,1), got [ %s ]" % delta)
        if not (a_c > 0.0 and g_apg > 0.0):
            raise ConfigError("*** ERROR *** TFP levels and the productivity gap must be > 0")

    @property
    def a_f(self) -> float:
        return self.a_c / self.g_apg

    def capital_labor_ratio(self, r_net: float) -> float:
        """k such that the net return a_c*alpha*k**(alpha-1) - delta equals r_net"""
        if not r_net > -self.delta:
            raise ValueError(
                "*** ERROR *** net return [ %s ] must exceed -delta [ %s ]" % (r_net, -self.delta)
            )
        return (self.alpha * self.a_c / (r_net + self.delta)) ** (1.0 / (1.0 - self.alpha))

    def wage_at_rate(self, r_net: float) -> float:
        k = self.capital_labor_ratio(r_net)
        return self.a_c * (1.0 - self.alpha) * k**self.alpha

    def output_per_worker(self, k):
        """value of output per worker in numeraire units, a_c * k**alpha
        (identical in both sectors once food is valued at p)"""
        return self.a_c * k**self.alpha

    def same_as(self, other) -> bool:
        return self.get_options() == other.get_options()


class ClimateScenario(FoodgapBase):
    """TFP loss fractions in agriculture (xi_f) and elsewhere (xi_c)"""

    def __init__(
        self,
        xi_f: float = 0.25,
        xi_c: float = 0.0,
        name: str = None,
        _stop_at_defaults: bool = False,
    ):
        self.xi_f = xi_f
        self.xi_c = xi_c
        self.name = name
        if _stop_at_defaults:
            return
        for label, xi in (("xi_f", xi_f), ("xi_c", xi_c)):
            if not 0.0 <= xi < 1.0:
                raise ConfigError("*** ERROR *** %s must be in [0,1), got [ %s ]" % (label, xi))
        if self.name is None:
            self.name = "xi_f=%g,xi_c=%g" % (xi_f, xi_c)

    @classmethod
    def named(cls, name: str):
        try:
            xi_f, xi_c = NAMED_SCENARIOS[name]
        except KeyError:
            raise ConfigError(
                "*** ERROR *** unknown scenario [ %s ], valid: %s"
                % (name, sorted(NAMED_SCENARIOS))
            )
        return cls(xi_f=xi_f, xi_c=xi_c, name=name)


# agricultural TFP losses of the reference calibration; "low"/"high" alias
# the optimistic/pessimistic ends of the regional uncertainty range
NAMED_SCENARIOS = {
    "no-damage": (0.0, 0.0),
    "baseline": (0.25, 0.0),
    "optimistic": (0.11, 0.0),
    "pessimistic": (0.40, 0.0),
    "low": (0.11, 0.0),
    "high": (0.40, 0.0),
}


class Prices(NamedTuple):
    """r: gross return on assets; w: wage per efficiency unit; p: food price"""

    r: float
    w: float
    p: float

    @property
    def r_net(self) -> float:
        return self.r - 1.0


def apply_scenario(tech: Technology, scenario: ClimateScenario) -> Technology:
    """damaged technology; the gap scales by (1 - xi_c) / (1 - xi_f)"""
    a_c = (1.0 - scenario.xi_c) * tech.a_c
    g_apg = tech.g_apg * (1.0 - scenario.xi_c) / (1.0 - scenario.xi_f)
    return Technology(alpha=tech.alpha, delta=tech.delta, a_c=a_c, g_apg=g_apg)


def prices_from_capital(tech: Technology, k: float) -> Prices:
    """factor prices at capital per efficiency unit of labor `k`"""
    if not k > 0.0:
        raise ValueError("*** ERROR *** capital-labor ratio must be > 0, got [ %s ]" % k)
    r = 1.0 + tech.a_c * tech.alpha * k ** (tech.alpha - 1.0) - tech.delta
    w = tech.a_c * (1.0 - tech.alpha) * k**tech.alpha
    p = tech.g_apg
    return Prices(r=r, w=w, p=p)


def prices_from_rate(tech: Technology, r_net: float) -> Prices:
    return prices_from_capital(tech, tech.capital_labor_ratio(r_net))


def weighted_damage(regional_losses, share_tol: float = 0.01) -> float:
    """population-weighted mean of regional losses, `regional_losses` being an
    iterable of (loss, population share) pairs; residual population ignored.
    Shares may overshoot one by `share_tol` (rounded published percentages)."""
    pairs = np.asarray(list(regional_losses), dtype=float).reshape(-1, 2)
    losses, shares = pairs[:, 0], pairs[:, 1]
    if np.any(shares < 0.0):
        raise ValueError("*** ERROR *** population shares must be >= 0")
    if shares.sum() > 1.0 + share_tol:
        raise ValueError(
            "*** ERROR *** population shares sum to more than one [ %s ]" % shares.sum()
        )
    if shares.sum() > 1.0:
        logger.warning("population shares sum to %.4f, renormalizing", shares.sum())
    if shares.sum() == 0.0:
        raise ValueError("*** ERROR *** population shares are all zero")
    if not np.all(np.isfinite(losses)):
        raise ValueError("*** ERROR *** regional losses must be finite")
    return float(losses @ shares / shares.sum())


def read_regional_damages(fname: str = None) -> pd.DataFrame:
    """read the regional damage table; the packaged table is used by default.
    Population shares may be given in percent or as fractions."""
    if fname is None:
        fname = get_datafile(REGIONAL_DAMAGES_FILE)
    table = pd.read_csv(fname, comment="#")
    missing = [c for c in REGIONAL_COLUMNS if c not in table.columns]
    if missing:
        raise ConfigError(
            "*** ERROR *** regional damage table [ %s ] lacks columns %s" % (fname, missing)
        )
    if table["population_share"].sum() > 1.5:
        table["population_share"] = table["population_share"] / 100.0
    return table[REGIONAL_COLUMNS]


def scenario_from_regions(table: pd.DataFrame, column: str = "loss_baseline_pct", name=None):
    """agricultural-only scenario at the population-weighted regional loss"""
    loss_pct = weighted_damage(zip(table[column], table["population_share"]))
    return ClimateScenario(xi_f=-loss_pct / 100.0, xi_c=0.0, name=name or column)


class SectorAccounts(NamedTuple):
    y_f: float
    y_c: float
    l_f: float
    l_c: float
    k_f: float
    k_c: float
    walras_residual: float


def sector_accounts(tech: Technology, capital, labor, f_agg, c_agg) -> SectorAccounts:
    """split capital and labor between sectors at the common capital-labor
    ratio, given aggregate food demand; the non-food goods market residual
    y_c - c_agg - delta*K is returned relative to y_c"""
    if not (capital > 0.0 and labor > 0.0):
        raise ValueError("*** ERROR *** aggregates must be positive")
    k = capital / labor
    food_per_worker = tech.a_f * k**tech.alpha
    l_f = f_agg / food_per_worker
    if l_f > labor:
        raise SubsistenceError(
            "*** ERROR *** food demand cannot be produced with the available labor",
            f_agg=f_agg, labor_needed=l_f, labor=labor,
        )
    l_c = labor - l_f
    y_c = tech.a_c * k**tech.alpha * l_c
    y_f = tech.a_f * k**tech.alpha * l_f
    walras = (y_c - c_agg - tech.delta * capital) / y_c if y_c > 0.0 else np.inf
    return SectorAccounts(
        y_f=y_f, y_c=y_c, l_f=l_f, l_c=l_c, k_f=k * l_f, k_c=k * l_c, walras_residual=walras
    )


def output_shares(accounts: SectorAccounts, p: float) -> dict:
    value_f = p * accounts.y_f
    total = value_f + accounts.y_c
    return {"food": value_f / total, "nonfood": accounts.y_c / total}


def factor_exhaustion_residual(tech: Technology, k_j, l_j) -> float:
    """w*L_j + (r - 1 + delta)*K_j - value of output, relative"""
    prices = prices_from_capital(tech, k_j / l_j)
    value = tech.a_c * k_j**tech.alpha * l_j ** (1.0 - tech.alpha)
    paid = prices.w * l_j + (prices.r - 1.0 + tech.delta) * k_j
    return (paid - value) / value


def apg_response(tech: Technology, total_loss: float, ag_shares) -> pd.DataFrame:
    """productivity gap when `total_loss` is split between sectors, a share
    `s` borne by agriculture: xi_f = s*L, xi_c = (1-s)*L"""
    rows = []
    for share in ag_shares:
        scen = ClimateScenario(xi_f=share * total_loss, xi_c=(1.0 - share) * total_loss)
        damaged = apply_scenario(tech, scen)
        rows.append(
            {
                "ag_share": share,
                "xi_f": scen.xi_f,
                "xi_c": scen.xi_c,
                "g_apg": damaged.g_apg,
                "food_price_change": damaged.g_apg / tech.g_apg - 1.0,
            }
        )
    return pd.DataFrame(rows)
