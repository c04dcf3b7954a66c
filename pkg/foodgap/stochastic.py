import logging

import numpy as np
from quantecon import MarkovChain
from quantecon.markov.approximation import rouwenhorst

from .common import FoodgapBase
from .common import ConfigError
from .common import ConvergenceError

logger = logging.getLogger(__name__)


class IncomeConfig(FoodgapBase):
    """parameters of the idiosyncratic labor-productivity process

    Productivity of a household is

        theta = floor + (1 - floor) * tau * eps

    with a permanent type `tau` (equal masses, log-linearly spaced over
    `n_types` values with spread `type_spread`, mean one) and a persistent
    shock `eps` (Rouwenhorst AR(1) in logs, mean one). The floor keeps the
    poorest households above subsistence while the type spread stretches
    the top of the distribution.

    rho          persistence of log shocks, in [0, 1)
    sigma        innovation spread of log shocks, > 0
    n_states     number of shock states, >= 2
    n_types      number of permanent types, >= 1
    type_spread  log spread between the lowest and highest type, >= 0
                 (pinned by calibration in full runs)
    floor        common productivity floor, in [0, 1)

    With `n_types=1` and `floor=0` the process is the plain AR(1) chain.
    """

    def __init__(
        self,
        rho: float = 0.23,
        sigma: float = 0.5,
        n_states: int = 7,
        n_types: int = 5,
        type_spread: float = 10.0,
        floor: float = 0.19,
        _stop_at_defaults: bool = False,
    ):
        self.rho = rho
        self.sigma = sigma
        self.n_states = n_states
        self.n_types = n_types
        self.type_spread = type_spread
        self.floor = floor
        if _stop_at_defaults:
            return
        _check_ar1_params(rho, sigma, n_states)
        _check_type_params(n_types, type_spread, floor)

    def build(self):
        if self.n_types == 1 and self.floor == 0.0:
            return discretize_ar1(self.rho, self.sigma, self.n_states)
        return discretize_types(
            self.rho, self.sigma, self.n_states, self.n_types, self.type_spread, self.floor
        )


class IncomeProcess:
    """finite Markov chain for labor productivity `theta`

    levels      nondecreasing productivity values, normalized so that the
                stationary mean is one
    transition  row-stochastic matrix
    stationary  invariant probability vector; required when the chain is
                reducible (permanent types), where it fixes the type masses

    Arrays are made read-only: the same process is shared by every steady
    state of a comparison.
    """

    def __init__(self, levels, transition, stationary=None):
        levels = np.array(levels, dtype=float)
        transition = np.array(transition, dtype=float)
        _check_stochastic(transition)
        if stationary is None:
            stationary = stationary_distribution(transition)
        stationary = np.array(stationary, dtype=float)
        if levels.ndim != 1 or levels.shape[0] != transition.shape[0]:
            raise ValueError(
                "*** ERROR *** levels [ %s ] do not match the transition matrix [ %s ]"
                % (levels.shape, transition.shape)
            )
        if np.any(levels <= 0.0) or np.any(np.diff(levels) < 0.0):
            raise ValueError("*** ERROR *** productivity levels must be positive and nondecreasing")
        residual = np.max(np.abs(stationary @ transition - stationary))
        if residual > 1e-10 or abs(stationary.sum() - 1.0) > 1e-12:
            raise ValueError(
                "*** ERROR *** vector is not stationary for the chain (residual %g)" % residual
            )
        for arr in (levels, transition, stationary):
            arr.setflags(write=False)
        self.levels = levels
        self.transition = transition
        self.stationary = stationary

    @property
    def n_states(self) -> int:
        return self.levels.shape[0]

    @property
    def theta_min(self) -> float:
        return float(self.levels[0])

    def mean(self) -> float:
        return float(self.stationary @ self.levels)

    def autocorrelation(self) -> float:
        """first-order autocorrelation of log productivity under the stationary law"""
        s = np.log(self.levels)
        mean = self.stationary @ s
        var = self.stationary @ (s - mean) ** 2
        if var == 0.0:
            return 0.0
        cov = (self.stationary * (s - mean)) @ self.transition @ (s - mean)
        return float(cov / var)

    def simulate(self, ts_length: int, init=None, random_state=None):
        """simulate a path of state indices"""
        mc = MarkovChain(np.array(self.transition))
        return mc.simulate_indices(ts_length, init=init, random_state=random_state)

    def simulation_gap(self, ts_length: int = 500, num_reps: int = 1000, seed: int = 0) -> float:
        """sup-norm distance between simulated state frequencies and the
        stationary law; paths start from stationary draws so that reducible
        chains keep their type masses"""
        rng = np.random.default_rng(seed)
        init = rng.choice(self.n_states, size=num_reps, p=self.stationary)
        paths = self.simulate(ts_length, init=init, random_state=seed)
        freq = np.bincount(np.ravel(paths), minlength=self.n_states) / np.size(paths)
        return float(np.max(np.abs(freq - self.stationary)))

    def tobytes(self) -> bytes:
        return self.levels.tobytes() + self.transition.tobytes() + self.stationary.tobytes()

    def same_as(self, other) -> bool:
        return self.tobytes() == other.tobytes()

    def __repr__(self):
        return "IncomeProcess(n_states=%d, levels=%s)" % (self.n_states, np.round(self.levels, 4))


def _check_ar1_params(rho, sigma, n_states):
    if int(n_states) != n_states or n_states < 2:
        raise ConfigError("*** ERROR *** n_states must be an integer >= 2, got [ %s ]" % n_states)
    if not sigma > 0.0:
        raise ConfigError("*** ERROR *** sigma must be > 0, got [ %s ]" % sigma)
    if not 0.0 <= rho < 1.0:
        raise ConfigError("*** ERROR *** rho must be in [0,1), got [ %s ]" % rho)


def _check_stochastic(transition, atol=1e-12):
    if transition.ndim != 2 or transition.shape[0] != transition.shape[1]:
        raise ValueError("*** ERROR *** transition must be a square matrix")
    if np.any(transition < 0.0):
        raise ValueError("*** ERROR *** transition has negative entries")
    rows = transition.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > atol:
        raise ValueError(
            "*** ERROR *** transition rows must sum to one (max deviation %g)"
            % np.max(np.abs(rows - 1.0))
        )


def discretize_ar1(rho: float, sigma: float, n_states: int = 7) -> IncomeProcess:
    """Rouwenhorst discretization of log theta' = rho * log theta + sigma * eps,
    exponentiated and rescaled so that the stationary mean of theta is one"""
    _check_ar1_params(rho, sigma, n_states)
    mc = rouwenhorst(int(n_states), rho=rho, sigma=sigma)
    transition = np.array(mc.P, dtype=float)
    # rows are exact up to rounding; renormalize so the 1e-12 check holds
    transition = transition / transition.sum(axis=1, keepdims=True)
    stationary = stationary_distribution(transition)
    levels = np.exp(np.array(mc.state_values, dtype=float))
    levels = levels / (stationary @ levels)
    logger.debug(
        "discretized AR(1): rho=%s sigma=%s n=%d theta_min=%.4f theta_max=%.4f",
        rho, sigma, n_states, levels[0], levels[-1],
    )
    return IncomeProcess(levels, transition, stationary)


def _check_type_params(n_types, type_spread, floor):
    if int(n_types) != n_types or n_types < 1:
        raise ConfigError("*** ERROR *** n_types must be an integer >= 1, got [ %s ]" % n_types)
    if not type_spread >= 0.0:
        raise ConfigError("*** ERROR *** type_spread must be >= 0, got [ %s ]" % type_spread)
    if not 0.0 <= floor < 1.0:
        raise ConfigError("*** ERROR *** floor must be in [0,1), got [ %s ]" % floor)


def type_weights(n_types: int, type_spread: float) -> np.ndarray:
    """permanent type multipliers exp(spread/2 * x), x evenly spaced on
    [-1, 1], rescaled to mean one"""
    x = np.linspace(-1.0, 1.0, int(n_types)) if n_types > 1 else np.zeros(1)
    tau = np.exp(0.5 * type_spread * x)
    return tau / tau.mean()


def discretize_types(
    rho: float,
    sigma: float,
    n_states: int = 7,
    n_types: int = 5,
    type_spread: float = 10.0,
    floor: float = 0.19,
) -> IncomeProcess:
    """productivity chain of permanent types on top of a Rouwenhorst shock

    States are the (type, shock) pairs sorted by productivity. Types never
    change, so the chain is block diagonal before sorting and its stationary
    law is the product of equal type masses and the shock law.
    """
    _check_ar1_params(rho, sigma, n_states)
    _check_type_params(n_types, type_spread, floor)
    shock = discretize_ar1(rho, sigma, n_states)
    tau = type_weights(n_types, type_spread)
    levels = floor + (1.0 - floor) * np.outer(tau, shock.levels).ravel()
    transition = np.kron(np.eye(int(n_types)), shock.transition)
    stationary = np.kron(np.full(int(n_types), 1.0 / n_types), shock.stationary)
    order = np.argsort(levels, kind="stable")
    levels = levels[order]
    transition = transition[np.ix_(order, order)]
    stationary = stationary[order]
    # the floor term and the type mean are both exact; renormalize rounding only
    levels = levels / (stationary @ levels)
    logger.debug(
        "productivity types: n_types=%d spread=%s floor=%s theta_min=%.4f theta_max=%.4f",
        n_types, type_spread, floor, levels[0], levels[-1],
    )
    return IncomeProcess(levels, transition, stationary)


def stationary_distribution(transition, tol: float = 1e-13, max_iter: int = 100000):
    """invariant distribution of a row-stochastic matrix by power iteration,
    starting from the uniform vector"""
    transition = np.asarray(transition, dtype=float)
    _check_stochastic(transition)
    n = transition.shape[0]
    pi = np.full(n, 1.0 / n)
    for it in range(max_iter):
        pi_new = pi @ transition
        pi_new /= pi_new.sum()
        if np.max(np.abs(pi_new - pi)) < tol:
            return pi_new
        pi = pi_new
    raise ConvergenceError(
        "*** ERROR *** stationary distribution of the income chain did not converge",
        max_iter=max_iter,
    )
