"""
Calibration of the household side.

Preferences come from the food Engel curve: with Stone-Geary demand the food
share is linear in the inverse of total expenditures,

    share = (1 - phi) + p * phi * f_bar / y_exp

so a (population-weighted) regression of segment food shares on 1/y_exp
recovers phi from the intercept and f_bar from the slope. The income spread
is then chosen so that the no-damage steady state matches a target 80-20
ratio of total expenditures. By default the spread of the permanent
productivity types is calibrated; the shock innovation `sigma` can be
chosen instead.
"""

import os
import copy
import logging
from typing import NamedTuple

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy.optimize import brentq

from .common import FoodgapError
from .common import ConfigError
from .common import BracketError
from .common import ConvergenceError
from .common import get_datafile
from .production import ClimateScenario
from .preferences import food_share
from .core import SteadyStateSolver

logger = logging.getLogger(__name__)

SEGMENTS_EXAMPLE_FILE = "expenditure_segments_example.csv"
SEGMENT_COLUMNS = ["segment", "lower", "upper", "mean_expenditure", "food_share", "weight"]
# per-capita daily expenditure bounds of the standard consumption segments
SEGMENT_BOUNDS = {
    "lowest": (0.0, 2.97),
    "low": (2.97, 8.44),
    "middle": (8.44, 23.03),
    "higher": (23.03, np.inf),
}


class ExpenditureSegments:
    """segment-level expenditure data

    frame columns: segment, lower, upper, mean_expenditure, food_share, weight
    """

    def __init__(self, frame: pd.DataFrame):
        missing = [c for c in SEGMENT_COLUMNS if c not in frame.columns]
        if missing:
            raise ConfigError("*** ERROR *** expenditure segments lack columns %s" % missing)
        frame = frame[SEGMENT_COLUMNS].reset_index(drop=True)
        self.frame = frame
        self._validate()

    def _validate(self):
        f = self.frame
        if not np.all((f["food_share"] > 0.0) & (f["food_share"] < 1.0)):
            raise ConfigError("*** ERROR *** food shares must be in (0,1)")
        if not np.all(f["weight"] > 0.0):
            raise ConfigError("*** ERROR *** segment weights must be positive")
        if not np.all(f["mean_expenditure"] > 0.0):
            raise ConfigError("*** ERROR *** mean expenditures must be positive")
        if not np.all(f["lower"] < f["upper"]):
            raise ConfigError("*** ERROR *** segment bounds must satisfy lower < upper")
        inside = (f["mean_expenditure"] >= f["lower"]) & (f["mean_expenditure"] <= f["upper"])
        if not np.all(inside):
            bad = list(f.loc[~inside, "segment"])
            raise ConfigError("*** ERROR *** segment means outside their bounds: %s" % bad)
        for _, row in f.iterrows():
            bounds = SEGMENT_BOUNDS.get(row["segment"])
            if bounds is None:
                continue
            if not np.allclose((row["lower"], row["upper"]), bounds):
                raise ConfigError(
                    "*** ERROR *** segment [ %s ] bounds (%s, %s) differ from the standard %s"
                    % (row["segment"], row["lower"], row["upper"], bounds)
                )

    @classmethod
    def read(cls, fname: str = None):
        """read a segment CSV; the packaged example is used by default"""
        if fname is None:
            fname = get_datafile(SEGMENTS_EXAMPLE_FILE)
        elif not os.path.exists(fname):
            raise ConfigError("*** ERROR *** segment file [ %s ] does not exist" % fname)
        return cls(pd.read_csv(fname, comment="#"))

    @classmethod
    def synthetic(cls, prefs, expenditures, p: float = 1.0, weights=None):
        """segments whose food shares follow the model demand exactly"""
        y = np.asarray(expenditures, dtype=float)
        weights = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
        frame = pd.DataFrame(
            {
                "segment": ["s%d" % i for i in range(y.shape[0])],
                "lower": 0.5 * y,
                "upper": 2.0 * y,
                "mean_expenditure": y,
                "food_share": food_share(prefs, p, y),
                "weight": weights,
            }
        )
        return cls(frame)

    def __len__(self):
        return self.frame.shape[0]


class PreferenceEstimate(NamedTuple):
    phi: float
    f_bar: float
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    rsquared: float
    nobs: int


def estimate_preferences(
    data: ExpenditureSegments, p_data: float = 1.0, mean_expenditure: float = 1.0, weighted: bool = True
) -> PreferenceEstimate:
    """regress food shares on inverse expenditures

    phi   = 1 - intercept
    f_bar = slope / (p_data * phi), divided by `mean_expenditure` (data
            currency per model unit) to express it in model units
    """
    frame = data.frame
    y = frame["mean_expenditure"].values.astype(float)
    if np.unique(y).shape[0] < 2:
        raise ConfigError("*** ERROR *** at least two distinct expenditure levels are needed")
    if not (p_data > 0.0 and mean_expenditure > 0.0):
        raise ConfigError("*** ERROR *** p_data and mean_expenditure must be > 0")
    exog = sm.add_constant(1.0 / y)
    weights = frame["weight"].values if weighted else np.ones_like(y)
    fit = sm.WLS(frame["food_share"].values, exog, weights=weights).fit()
    intercept, slope = (float(v) for v in fit.params)
    phi = 1.0 - intercept
    if not 0.0 < phi < 1.0:
        raise ConfigError("*** ERROR *** estimated phi [ %s ] is outside (0,1)" % phi)
    f_bar = slope / (p_data * phi) / mean_expenditure
    logger.info("Engel regression: intercept=%.6f slope=%.6f R2=%.6f", intercept, slope, fit.rsquared)
    return PreferenceEstimate(
        phi=phi,
        f_bar=f_bar,
        intercept=intercept,
        slope=slope,
        intercept_se=float(fit.bse[0]),
        slope_se=float(fit.bse[1]),
        rsquared=float(fit.rsquared),
        nobs=int(fit.nobs),
    )


class SpreadCalibration(NamedTuple):
    parameter: str
    value: float
    achieved: float
    target: float
    evaluations: list


# income options the 80-20 ratio can be calibrated on, with default brackets
SPREAD_PARAMETERS = {
    "type_spread": (1.0, 16.0),
    "sigma": (0.05, 3.0),
}


def _with_income(options: dict, parameter: str, value: float) -> dict:
    opts = copy.deepcopy(options)
    opts["income"]["values"][parameter] = float(value)
    return opts


def _spread_parameter(parameter: str):
    if parameter not in SPREAD_PARAMETERS:
        raise ConfigError(
            "*** ERROR *** cannot calibrate [ %s ]; choose one of %s"
            % (parameter, sorted(SPREAD_PARAMETERS))
        )


def calibrate_spread(
    target_8020: float,
    options: dict = None,
    rho: float = None,
    n_states: int = None,
    parameter: str = "type_spread",
    bracket=None,
    rtol: float = 0.005,
    max_halvings: int = 6,
) -> SpreadCalibration:
    """value of the income spread `parameter` such that the no-damage
    steady state's 80-20 ratio of total expenditures equals `target_8020`
    (relative tolerance `rtol`)"""
    _spread_parameter(parameter)
    if not target_8020 >= 1.0:
        raise ConfigError("*** ERROR *** an 80-20 target must be >= 1, got [ %s ]" % target_8020)
    options = SteadyStateSolver.merge_options(options or {})
    if rho is not None:
        options["income"]["values"]["rho"] = rho
    if n_states is not None:
        options["income"]["values"]["n_states"] = n_states
    no_damage = ClimateScenario.named("no-damage")
    cache = {}

    def ratio(value):
        if value not in cache:
            solver = SteadyStateSolver(_with_income(options, parameter, value))
            state = solver.solve(no_damage)
            cache[value] = state.indicators["expenditure_8020"]
            logger.info("%s=%.6f -> 80-20 ratio %.4f", parameter, value, cache[value])
        return cache[value]

    lo, hi = SPREAD_PARAMETERS[parameter] if bracket is None else bracket
    if not 0.0 < lo < hi:
        raise ConfigError("*** ERROR *** %s bracket must satisfy 0 < lo < hi" % parameter)
    ratio_lo = ratio(lo)
    for _ in range(max_halvings + 1):
        try:
            ratio_hi = ratio(hi)
            break
        except FoodgapError as exc:
            logger.warning("no steady state at %s=%.4f (%s); halving the bracket", parameter, hi, exc.message)
            hi = lo + 0.5 * (hi - lo)
    else:
        raise BracketError(
            "*** ERROR *** no solvable upper end for the %s bracket" % parameter,
            lo=lo, hi=hi,
        )
    if not ratio_lo <= target_8020 <= ratio_hi:
        raise BracketError(
            "*** ERROR *** 80-20 target outside the achievable range",
            target=target_8020, achieved_lo=ratio_lo, achieved_hi=ratio_hi,
            parameter=parameter, lo=lo, hi=hi,
        )
    # each evaluation is a full steady state; the ratio tolerance is loose
    value = brentq(lambda v: ratio(v) - target_8020, lo, hi, xtol=1e-4 * (hi - lo), rtol=1e-6)
    achieved = ratio(value)
    if abs(achieved / target_8020 - 1.0) > rtol:
        raise ConvergenceError(
            "*** ERROR *** calibrated 80-20 ratio misses the target",
            parameter=parameter, value=value, achieved=achieved, target=target_8020,
        )
    evaluations = sorted(cache.items())
    ratios = np.array([r for _, r in evaluations])
    if np.any(np.diff(ratios) < 0.0):
        logger.warning("the 80-20 ratio is not monotone in %s over the evaluated points", parameter)
    return SpreadCalibration(
        parameter=parameter, value=value, achieved=achieved, target=target_8020, evaluations=evaluations
    )


def monotonicity_scan(
    options: dict = None, values=(2.0, 5.0, 8.0, 11.0), parameter: str = "type_spread"
) -> pd.DataFrame:
    """80-20 ratio of the no-damage steady state over a coarse grid of `parameter`"""
    _spread_parameter(parameter)
    options = SteadyStateSolver.merge_options(options or {})
    rows = []
    for value in values:
        solver = SteadyStateSolver(_with_income(options, parameter, value))
        state = solver.solve(ClimateScenario.named("no-damage"))
        rows.append({parameter: value, "expenditure_8020": state.indicators["expenditure_8020"]})
    return pd.DataFrame(rows)


def calibration_report(estimate: PreferenceEstimate = None, spread: SpreadCalibration = None) -> pd.DataFrame:
    """one row per calibrated quantity: name, value, standard error, target"""
    rows = []
    if estimate is not None:
        rows += [
            {"quantity": "phi", "value": estimate.phi, "std_error": estimate.intercept_se, "target": np.nan},
            {"quantity": "f_bar", "value": estimate.f_bar, "std_error": np.nan, "target": np.nan},
            {"quantity": "intercept", "value": estimate.intercept, "std_error": estimate.intercept_se, "target": np.nan},
            {"quantity": "slope", "value": estimate.slope, "std_error": estimate.slope_se, "target": np.nan},
            {"quantity": "rsquared", "value": estimate.rsquared, "std_error": np.nan, "target": np.nan},
        ]
    if spread is not None:
        rows += [
            {"quantity": spread.parameter, "value": spread.value, "std_error": np.nan, "target": np.nan},
            {"quantity": "expenditure_8020", "value": spread.achieved, "std_error": np.nan, "target": spread.target},
        ]
    return pd.DataFrame(rows, columns=["quantity", "value", "std_error", "target"])
