"""
Household savings problem solved by the endogenous grid method.

The Stone-Geary indirect utility turns the two-good problem into a one-good
problem in total expenditures y with marginal utility proportional to
(y - p*f_bar)**(-eta). The Euler equation

    (y - p*f_bar)**(-eta) = beta * r * E[(y' - p*f_bar)**(-eta) | theta]

is inverted on a fixed grid of next-period assets; current assets follow
from the budget y = r*a + w*theta - a'.
"""

import logging

import numpy as np

from ..common import ConvergenceError
from ..common import GridError
from ..common import SubsistenceError
from ..common import FoodgapBase
from ..common import ConfigError

logger = logging.getLogger(__name__)


class EGMConfig(FoodgapBase):
    """tol       sup-norm on successive expenditure policies
    max_iter  iteration budget"""

    def __init__(self, tol: float = 1e-9, max_iter: int = 10000, _stop_at_defaults: bool = False):
        self.tol = tol
        self.max_iter = max_iter
        if _stop_at_defaults:
            return
        if not tol > 0.0 or max_iter < 1:
            raise ConfigError("*** ERROR *** EGM tol must be > 0 and max_iter >= 1")


class Policy:
    """policy functions on the (asset node, productivity state) grid

    savings              a'(a_i, theta_j)
    expenditures         y_exp(a_i, theta_j) = r*a_i + w*theta_j - a'(a_i, theta_j)
    endogenous_assets    current assets at which a' equals node i is optimal
                         in state j (from the last EGM step)
    """

    def __init__(self, savings, expenditures, endogenous_assets, prices, iterations=0):
        self.savings = savings
        self.expenditures = expenditures
        self.endogenous_assets = endogenous_assets
        self.prices = prices
        self.iterations = iterations

    @property
    def shape(self):
        return self.savings.shape

    def constrained(self, grid):
        """mask of points where savings sit at the borrowing limit"""
        return self.savings <= grid.a_lo

    def budget_residual(self, grid, income):
        resources = self.prices.r * grid.nodes[:, None] + self.prices.w * income.levels[None, :]
        return np.max(np.abs(self.savings + self.expenditures - resources))

    def expenditures_at(self, grid, assets, state: int):
        """linear interpolation (with linear extrapolation) of y_exp(., theta_j)"""
        return _interp_extrap(assets, grid.nodes, self.expenditures[:, state])


def _interp_extrap(x, xp, fp):
    """np.interp with linear extrapolation on both ends"""
    x = np.asarray(x, dtype=float)
    y = np.interp(x, xp, fp)
    lo = x < xp[0]
    if np.any(lo):
        slope = (fp[1] - fp[0]) / (xp[1] - xp[0])
        y[lo] = fp[0] + slope * (x[lo] - xp[0])
    hi = x > xp[-1]
    if np.any(hi):
        slope = (fp[-1] - fp[-2]) / (xp[-1] - xp[-2])
        y[hi] = fp[-1] + slope * (x[hi] - xp[-1])
    return y


def _resources(prices, grid, income):
    return prices.r * grid.nodes[:, None] + prices.w * income.levels[None, :]


def check_feasible(prefs, prices, grid, income):
    """households at the borrowing limit in the lowest state, saving at the
    limit, must afford more than subsistence food"""
    worst = (prices.r - 1.0) * grid.a_lo + prices.w * income.theta_min
    if worst <= prices.p * prefs.f_bar:
        raise SubsistenceError(
            "*** ERROR *** households at the borrowing limit cannot afford subsistence food",
            r=prices.r, w=prices.w, p=prices.p, a_lo=grid.a_lo, theta_min=income.theta_min,
        )


def egm_step(prefs, prices, grid, income, expenditures):
    """one EGM update; returns (savings, expenditures, endogenous assets)"""
    nodes = grid.nodes
    # expected marginal utility for each choice of a' (rows) and current state (cols)
    mu_next = prefs.marginal_utility(prices.p, expenditures)
    expected = mu_next @ income.transition.T
    y_endo = prefs.inverse_marginal_utility(prices.p, prefs.beta * prices.r * expected)
    a_endo = (y_endo + nodes[:, None] - prices.w * income.levels[None, :]) / prices.r

    savings = np.empty_like(expenditures)
    for j in range(income.n_states):
        a_j = a_endo[:, j]
        if np.any(np.diff(a_j) <= 0.0):
            raise ConvergenceError(
                "*** ERROR *** endogenous grid is not increasing", state=j
            )
        s = _interp_extrap(nodes, a_j, nodes)
        # below the first endogenous point the limit binds
        s[nodes < a_j[0]] = nodes[0]
        savings[:, j] = s
    np.clip(savings, nodes[0], nodes[-1], out=savings)
    new_expenditures = _resources(prices, grid, income) - savings
    return savings, new_expenditures, a_endo


def egm_solve(prefs, prices, income, grid, tol: float = 1e-9, max_iter: int = 10000, init=None):
    """iterate egm_step until the expenditure policy converges in sup-norm

    `init` is an optional starting policy (warm start between equilibrium
    iterates); the default guess saves at the limit and spends the rest."""
    deterministic = income.n_states == 1
    if prices.r * prefs.beta >= 1.0 and not (deterministic and prices.r * prefs.beta <= 1.0 + 1e-12):
        raise ConvergenceError(
            "*** ERROR *** beta * r >= 1: asset holdings are unbounded",
            r=prices.r, beta=prefs.beta,
        )
    check_feasible(prefs, prices, grid, income)
    resources = _resources(prices, grid, income)
    if init is not None and init.shape == resources.shape:
        expenditures = np.minimum(init.expenditures, resources - grid.a_lo)
    else:
        expenditures = resources - grid.a_lo
    for it in range(1, max_iter + 1):
        savings, new_expenditures, a_endo = egm_step(prefs, prices, grid, income, expenditures)
        dist = np.max(np.abs(new_expenditures - expenditures))
        expenditures = new_expenditures
        if dist < tol:
            logger.debug("EGM converged in %d iterations (sup-norm %.3e)", it, dist)
            top = savings[:, :] >= grid.a_max
            if np.any(top[:-1, :]):
                logger.debug("savings capped at the top node for %d points", int(top.sum()))
            return Policy(savings, expenditures, a_endo, prices, iterations=it)
    raise ConvergenceError(
        "*** ERROR *** EGM did not converge", max_iter=max_iter, last_distance=float(dist),
        r=prices.r,
    )


def euler_residuals(policy, prefs, prices, income, grid, at: str = "nodes"):
    """relative Euler errors (beta*r*E[(y'-pF)^-eta])^(-1/eta) / (y-pF) - 1

    at="nodes"       on the asset grid; next-period expenditures are
                     interpolated. Constrained points carry a nonnegative slack.
    at="endogenous"  at the endogenous points of the last EGM step, where
                     a' is a grid node and no interpolation enters
    """
    subsistence = prices.p * prefs.f_bar
    nodes = grid.nodes
    if at == "endogenous":
        mu_next = prefs.marginal_utility(prices.p, policy.expenditures)
        expected = mu_next @ income.transition.T
        current = (
            prices.r * policy.endogenous_assets
            + prices.w * income.levels[None, :]
            - nodes[:, None]
        )
    elif at == "nodes":
        n = income.n_states
        expected = np.zeros_like(policy.expenditures)
        for j in range(n):
            a_next = policy.savings[:, j]
            for jp in range(n):
                y_next = policy.expenditures_at(grid, a_next, jp)
                if np.any(y_next <= subsistence):
                    raise GridError(
                        "*** ERROR *** interpolated expenditures below subsistence",
                        state=j, next_state=jp,
                    )
                expected[:, j] += income.transition[j, jp] * (y_next - subsistence) ** (-prefs.eta)
        current = policy.expenditures
    else:
        raise ValueError("*** ERROR *** unknown residual location [ %s ]" % at)
    implied = (prefs.beta * prices.r * expected) ** (-1.0 / prefs.eta)
    return implied / (current - subsistence) - 1.0
