"""
Static two-good block: Stone-Geary preferences over non-food consumption `c`
and food `f` above the subsistence quantity `f_bar`,

    U(c, f) = (c**phi * (f - f_bar)**(1 - phi))**(1 - eta) / (1 - eta)

with the closed-form demand system, the indirect utility in terms of total
expenditures `y_exp = c + p*f`, and the equivalent variation used to price
welfare changes. Non-food consumption is the numeraire, `p` is the food price.

All functions accept scalars or numpy arrays (broadcasting) and never clamp:
expenditures at or below the subsistence cost `p*f_bar` raise SubsistenceError.
"""

from typing import NamedTuple

import numpy as np

from .common import FoodgapBase
from .common import ConfigError
from .common import SubsistenceError
from .common import InvariantError


class Preferences(FoodgapBase):
    """household preference parameters

    phi     non-food weight, in (0, 1)
    f_bar   subsistence food quantity (model units), >= 0
    eta     CRRA coefficient, > 0 and != 1
    beta    discount factor, in (0, 1)

    Defaults are the estimated values of the reference calibration.
    """

    def __init__(
        self,
        phi: float = 0.8196,
        f_bar: float = 0.0564,
        eta: float = 2.0,
        beta: float = 0.975,
        _stop_at_defaults: bool = False,
    ):
        self.phi = phi
        self.f_bar = f_bar
        self.eta = eta
        self.beta = beta
        if _stop_at_defaults:
            return
        self._validate()
        self._big_phi = phi**phi * (1.0 - phi) ** (1.0 - phi)

    def _validate(self):
        if not 0.0 < self.phi < 1.0:
            raise ConfigError("*** ERROR *** phi must be in (0,1), got [ %s ]" % self.phi)
        if not self.f_bar >= 0.0:
            raise ConfigError("*** ERROR *** f_bar must be >= 0, got [ %s ]" % self.f_bar)
        if not 0.0 < self.beta < 1.0:
            raise ConfigError("*** ERROR *** beta must be in (0,1), got [ %s ]" % self.beta)
        if not self.eta > 0.0:
            raise ConfigError("*** ERROR *** eta must be > 0, got [ %s ]" % self.eta)
        if self.eta == 1.0:
            raise ConfigError("*** ERROR *** eta = 1 (log utility) is not supported")

    @property
    def big_phi(self) -> float:
        """phi**phi * (1-phi)**(1-phi), cached at construction"""
        return self._big_phi

    def subsistence_cost(self, p):
        return p * self.f_bar

    def marginal_utility(self, p, y_exp):
        """marginal utility of expenditures, up to the price-dependent constant
        (big_phi * p**(phi-1))**(1-eta) which cancels in the Euler equation"""
        return _slack(self, p, y_exp) ** (-self.eta)

    def inverse_marginal_utility(self, p, mu):
        return self.subsistence_cost(p) + mu ** (-1.0 / self.eta)

    def same_as(self, other) -> bool:
        return self.get_options() == other.get_options()


class ConsumptionBundle(NamedTuple):
    c: np.ndarray
    f: np.ndarray
    y_exp: np.ndarray


def _slack(prefs: Preferences, p, y_exp):
    """expenditures net of the subsistence cost; raises when not positive"""
    y_exp = np.asarray(y_exp, dtype=float)
    slack = y_exp - p * prefs.f_bar
    if np.any(slack <= 0.0) or np.any(np.isnan(slack)):
        worst = float(np.min(slack))
        raise SubsistenceError(
            "*** ERROR *** expenditures at or below the subsistence cost",
            p=float(np.max(p)),
            f_bar=prefs.f_bar,
            min_slack=worst,
        )
    return slack


def _check_price(p):
    if np.any(np.asarray(p) <= 0.0):
        raise ValueError("*** ERROR *** food price must be positive, got [ %s ]" % p)


def demand(prefs: Preferences, p, y_exp) -> ConsumptionBundle:
    """non-food and food demand at price `p` and total expenditures `y_exp`"""
    _check_price(p)
    slack = _slack(prefs, p, y_exp)
    y_exp = np.asarray(y_exp, dtype=float)
    c = prefs.phi * slack
    # f from the budget keeps c + p*f == y_exp up to one rounding
    f = (y_exp - c) / p
    return ConsumptionBundle(c=c, f=f, y_exp=y_exp)


def food_share(prefs: Preferences, p, y_exp):
    """food expenditure share (1 - phi) + p*phi*f_bar/y_exp"""
    _check_price(p)
    _slack(prefs, p, y_exp)
    return (1.0 - prefs.phi) + p * prefs.phi * prefs.f_bar / np.asarray(y_exp, dtype=float)


def direct_utility(prefs: Preferences, c, f):
    c = np.asarray(c, dtype=float)
    f = np.asarray(f, dtype=float)
    surplus = f - prefs.f_bar
    if np.any(c <= 0.0) or np.any(surplus <= 0.0):
        raise SubsistenceError(
            "*** ERROR *** bundle with food at or below subsistence",
            f_bar=prefs.f_bar,
        )
    inner = c**prefs.phi * surplus ** (1.0 - prefs.phi)
    return inner ** (1.0 - prefs.eta) / (1.0 - prefs.eta)


def indirect_utility(prefs: Preferences, p, y_exp):
    """(big_phi * p**(phi-1) * (y_exp - p*f_bar))**(1-eta) / (1-eta)"""
    _check_price(p)
    slack = _slack(prefs, p, y_exp)
    inner = prefs.big_phi * p ** (prefs.phi - 1.0) * slack
    return inner ** (1.0 - prefs.eta) / (1.0 - prefs.eta)


def equivalent_variation(prefs: Preferences, p0, y0, p, y, rtol: float = 1e-10):
    """expenditure change `ev` at prices `p` such that
    indirect_utility(p0, y0) == indirect_utility(p, y + ev)

    The closed form is checked against the defining identity on every call.
    """
    _check_price(p0)
    _check_price(p)
    slack0 = _slack(prefs, p0, y0)
    y = np.asarray(y, dtype=float)
    ev = (p0 / p) ** (prefs.phi - 1.0) * slack0 - (y - p * prefs.f_bar)
    try:
        lhs = indirect_utility(prefs, p0, y0)
        rhs = indirect_utility(prefs, p, y + ev)
    except SubsistenceError as e:
        raise SubsistenceError(
            "*** ERROR *** equivalent variation infeasible at the new price", **e.context
        )
    if not np.allclose(lhs, rhs, rtol=rtol, atol=0.0):
        raise InvariantError(
            "*** ERROR *** equivalent variation identity violated",
            max_rel_error=float(np.max(np.abs(lhs - rhs) / np.abs(lhs))),
        )
    return ev


def equivalent_variation_pe(prefs: Preferences, p0, p, y0):
    """partial-equilibrium variant, expenditures held at `y0`:
    ((p0/p)**(phi-1) - 1)*y0 + (p - p**(1-phi) * p0**phi) * f_bar"""
    _check_price(p0)
    _check_price(p)
    y0 = np.asarray(y0, dtype=float)
    phi = prefs.phi
    return ((p0 / p) ** (phi - 1.0) - 1.0) * y0 + (
        p - p ** (1.0 - phi) * p0**phi
    ) * prefs.f_bar


def welfare_change(prefs: Preferences, p0, y0, p, y):
    """consumption-equivalent welfare change of moving from (p0, y0) to
    (p, y), negative for losses: minus the compensation `equivalent_variation`"""
    return -equivalent_variation(prefs, p0, y0, p, y)


def welfare_change_pe(prefs: Preferences, p0, p, y0):
    return -equivalent_variation_pe(prefs, p0, p, y0)


def price_derivatives(prefs: Preferences, p, y_exp) -> dict:
    """closed-form price derivatives of the demand system at fixed expenditures"""
    y_exp = np.asarray(y_exp, dtype=float)
    return {
        "dc_dp": -prefs.phi * prefs.f_bar * np.ones_like(y_exp),
        "df_dp": -(1.0 - prefs.phi) * y_exp / p**2,
        "dshare_dp": prefs.phi * prefs.f_bar / y_exp,
    }
