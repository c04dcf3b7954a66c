"""
Stationary joint distribution of assets and productivity.

Savings off the grid are assigned to the two bracketing nodes with linear
(lottery) weights; the productivity state then moves with the income chain.
Cells are indexed (asset node i, state j), flattened row-major as i*N + j.
"""

import logging
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .common import ConvergenceError
from .common import GridError
from .preferences import demand
from .preferences import food_share
from .analysis.inequality import weighted_quantiles

logger = logging.getLogger(__name__)

DECILES = np.arange(1, 10) / 10.0


class StationaryDistribution:
    """mass: M x N nonnegative matrix summing to one"""

    def __init__(self, mass, iterations=0, residual=np.nan):
        mass = np.asarray(mass, dtype=float)
        if np.any(mass < 0.0):
            raise ValueError("*** ERROR *** negative mass in the distribution")
        if abs(mass.sum() - 1.0) > 1e-12:
            raise ValueError("*** ERROR *** distribution mass sums to %.16f" % mass.sum())
        self.mass = mass
        self.iterations = iterations
        self.residual = residual

    @property
    def asset_marginal(self):
        return self.mass.sum(axis=1)

    @property
    def state_marginal(self):
        return self.mass.sum(axis=0)

    def top_node_mass(self) -> float:
        return float(self.mass[-1, :].sum())


def lottery(savings, grid):
    """lower bracketing node index and the weight put on it"""
    nodes = grid.nodes
    eps = 1e-10 * max(1.0, abs(nodes[-1]))
    if np.any(savings < nodes[0] - eps) or np.any(savings > nodes[-1] + eps):
        raise GridError(
            "*** ERROR *** savings outside the asset grid",
            min_savings=float(np.min(savings)), max_savings=float(np.max(savings)),
            a_lo=grid.a_lo, a_max=grid.a_max,
        )
    s = np.clip(savings, nodes[0], nodes[-1])
    lower = np.searchsorted(nodes, s, side="right") - 1
    lower = np.clip(lower, 0, nodes.shape[0] - 2)
    weight = (nodes[lower + 1] - s) / (nodes[lower + 1] - nodes[lower])
    return lower, weight


def transition_operator(policy, income, grid, mass_in):
    """push a distribution one period forward"""
    mass_in = np.asarray(mass_in, dtype=float)
    n_assets, n_states = mass_in.shape
    lower, weight = lottery(policy.savings, grid)
    states = np.broadcast_to(np.arange(n_states)[None, :], mass_in.shape)
    # asset image per origin state, accumulated in fixed cell order
    image = np.zeros_like(mass_in)
    np.add.at(image, (lower.ravel(), states.ravel()), (mass_in * weight).ravel())
    np.add.at(image, (lower.ravel() + 1, states.ravel()), (mass_in * (1.0 - weight)).ravel())
    return image @ income.transition


def transition_matrix(policy, income, grid):
    """sparse (M*N x M*N) matrix T with mass_out.ravel() = T.T @ mass_in.ravel()"""
    n_assets, n_states = policy.savings.shape
    lower, weight = lottery(policy.savings, grid)
    rows, cols, vals = [], [], []
    origin = np.arange(n_assets * n_states).reshape(n_assets, n_states)
    for jp in range(n_states):
        prob = income.transition[:, jp][None, :]
        for shift, w in ((0, weight), (1, 1.0 - weight)):
            rows.append(origin.ravel())
            cols.append(((lower + shift) * n_states + jp).ravel())
            vals.append((w * prob).ravel())
    size = n_assets * n_states
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )


def initial_mass(income, n_assets):
    """stationary productivity law times a point mass at the lowest node"""
    mass = np.zeros((n_assets, income.n_states))
    mass[0, :] = income.stationary
    return mass


def stationary(policy, income, grid, tol: float = 1e-13, max_iter: int = 200000, init=None):
    """iterate the transition operator to a fixed point (sup-norm `tol`)"""
    n_assets, n_states = policy.savings.shape
    if init is not None and init.shape == (n_assets, n_states):
        mass = np.array(init, dtype=float)
    else:
        mass = initial_mass(income, n_assets)
    # the sparse transpose applies the same lottery in a fixed order
    step = transition_matrix(policy, income, grid).T.tocsr()
    x = mass.ravel()
    for it in range(1, max_iter + 1):
        x_new = step @ x
        dist = np.max(np.abs(x_new - x))
        x = x_new
        if dist < tol:
            x = x / x.sum()
            mass = x.reshape(n_assets, n_states)
            logger.debug("stationary distribution after %d iterations (sup-norm %.3e)", it, dist)
            state_gap = np.max(np.abs(mass.sum(axis=0) - income.stationary))
            if state_gap > 1e-8:
                raise ConvergenceError(
                    "*** ERROR *** productivity marginal drifted from the income chain",
                    gap=state_gap,
                )
            return StationaryDistribution(mass, iterations=it, residual=dist)
    raise ConvergenceError(
        "*** ERROR *** stationary distribution did not converge",
        max_iter=max_iter, last_distance=float(dist),
    )


def stationary_dense(policy, income, grid):
    """eigenvector of the assembled transition matrix for eigenvalue one
    (dense, small instances only)"""
    matrix = transition_matrix(policy, income, grid).toarray()
    values, vectors = np.linalg.eig(matrix.T)
    k = np.argmin(np.abs(values - 1.0))
    vec = np.real(vectors[:, k])
    vec = vec / vec.sum()
    return vec.reshape(policy.savings.shape)


class Aggregates(NamedTuple):
    capital: float
    labor: float
    c_agg: float
    f_agg: float
    expenditures: float
    mean_food_share: float
    expenditure_deciles: np.ndarray


def aggregate(dist, grid, income, policy, prices, prefs) -> Aggregates:
    """integrate assets, labor and the demand system over the distribution"""
    mass = dist.mass
    capital = float(mass.sum(axis=1) @ grid.nodes)
    labor = float(mass.sum(axis=0) @ income.levels)
    bundle = demand(prefs, prices.p, policy.expenditures)
    shares = food_share(prefs, prices.p, policy.expenditures)
    return Aggregates(
        capital=capital,
        labor=labor,
        c_agg=float(np.sum(mass * bundle.c)),
        f_agg=float(np.sum(mass * bundle.f)),
        expenditures=float(np.sum(mass * policy.expenditures)),
        mean_food_share=float(np.sum(mass * shares)),
        expenditure_deciles=weighted_quantiles(policy.expenditures, mass, DECILES),
    )
