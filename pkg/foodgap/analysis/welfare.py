"""
Welfare and income incidence across the expenditure distribution.

Steady states are compared decile by decile, deciles being formed by rank of
total expenditures within each state (the d-th decile of the base state is
matched with the d-th decile of the alternative one). Because the demand
system is linear in expenditures, equivalent variations evaluated at decile
means equal the decile means of household equivalent variations.

The functions read steady states through a small duck-typed surface:
`dist.mass`, `policy.expenditures`, `grid.nodes`, `income.levels`, `prices`,
`prefs`.
"""

import numpy as np
import pandas as pd

from ..common import PrimitiveMismatchError
from ..preferences import demand
from ..preferences import food_share
from ..preferences import welfare_change
from .inequality import quantile_weights

N_DECILES = 10


def _cells(state):
    """per-cell expenditures, assets and productivity, plus the mass"""
    shape = state.dist.mass.shape
    assets = np.broadcast_to(state.grid.nodes[:, None], shape)
    theta = np.broadcast_to(state.income.levels[None, :], shape)
    return state.policy.expenditures, assets, theta, state.dist.mass


def decile_means(state, of: dict) -> dict:
    """decile means (by expenditure rank) of each per-cell array in `of`"""
    expenditures, _, _, mass = _cells(state)
    weights = quantile_weights(expenditures, mass, N_DECILES)
    norm = weights.sum(axis=1)
    return {k: (weights @ np.asarray(v, dtype=float).ravel()) / norm for k, v in of.items()}


def _state_deciles(state):
    expenditures, assets, theta, _ = _cells(state)
    shares = food_share(state.prefs, state.prices.p, expenditures)
    return decile_means(
        state, {"y_exp": expenditures, "assets": assets, "theta": theta, "food_share": shares}
    )


def engel_approximation(s0, dp_over_p0):
    """first-order welfare change, as a fraction of expenditures, of a
    relative food price change for a household with food share `s0`"""
    s0 = np.asarray(s0, dtype=float)
    if np.any(s0 <= 0.0) or np.any(s0 >= 1.0):
        raise ValueError("*** ERROR *** food share must be in (0,1)")
    return -s0 * dp_over_p0


def income_decomposition(base, alt) -> pd.DataFrame:
    """per-decile change in income w*theta + r*a, split into

    labor_wage      dw * theta_base
    labor_mix       w_alt * d theta   (zero when the deciles hold the same theta)
    capital_rate    a_base * dr
    capital_stock   r_alt * da
    """
    check_comparable(base, alt)
    d0 = _state_deciles(base)
    d1 = _state_deciles(alt)
    p0, p1 = base.prices, alt.prices
    frame = pd.DataFrame(
        {
            "decile": np.arange(1, N_DECILES + 1),
            "theta_base": d0["theta"],
            "theta_alt": d1["theta"],
            "assets_base": d0["assets"],
            "assets_alt": d1["assets"],
            "labor_wage": (p1.w - p0.w) * d0["theta"],
            "labor_mix": p1.w * (d1["theta"] - d0["theta"]),
            "capital_rate": d0["assets"] * (p1.r - p0.r),
            "capital_stock": p1.r * (d1["assets"] - d0["assets"]),
        }
    )
    frame["labor_total"] = frame["labor_wage"] + frame["labor_mix"]
    frame["income_total"] = (p1.w * d1["theta"] + p1.r * d1["assets"]) - (
        p0.w * d0["theta"] + p0.r * d0["assets"]
    )
    return frame


def pe_incidence(prefs, p0, p1, mass, expenditures) -> pd.DataFrame:
    """consumption and welfare effects of a food price change from p0 to p1
    with every household's expenditures held fixed.

    Households that cannot afford subsistence food at p1 are excluded from
    the consumption changes and reported through `infeasible_share`."""
    expenditures = np.asarray(expenditures, dtype=float)
    mass = np.asarray(mass, dtype=float)
    weights = quantile_weights(expenditures, mass, N_DECILES)
    norm = weights.sum(axis=1)
    y = expenditures.ravel()
    feasible = y > p1 * prefs.f_bar
    before = demand(prefs, p0, y)
    dc = np.zeros_like(y)
    df = np.zeros_like(y)
    dshare = np.zeros_like(y)
    if np.any(feasible):
        after = demand(prefs, p1, y[feasible])
        dc[feasible] = after.c - before.c[feasible]
        df[feasible] = after.f - before.f[feasible]
        dshare[feasible] = food_share(prefs, p1, y[feasible]) - food_share(prefs, p0, y[feasible])
    feasible_mass = weights @ feasible.astype(float)
    safe = np.where(feasible_mass > 0.0, feasible_mass, 1.0)
    y_mean = (weights @ y) / norm
    share0 = (weights @ food_share(prefs, p0, y)) / norm
    cev = welfare_change(prefs, p0, y_mean, p1, y_mean)
    return pd.DataFrame(
        {
            "decile": np.arange(1, N_DECILES + 1),
            "y_exp": y_mean,
            "food_share": share0,
            "dc": (weights @ dc) / safe,
            "df": (weights @ df) / safe,
            "dshare": (weights @ dshare) / safe,
            "cev_pe": cev,
            "cev_pe_rel": cev / y_mean,
            "engel": engel_approximation(share0, (p1 - p0) / p0),
            "infeasible_share": 1.0 - feasible_mass / norm,
        }
    )


class DecileTable:
    """ten rows of per-decile welfare and income changes between two steady
    states; columns in DecileTable.COLUMNS order"""

    COLUMNS = [
        "decile",
        "y_exp_base",
        "y_exp_alt",
        "food_share_base",
        "food_share_alt",
        "cev_pe",
        "cev_ge",
        "gap",
        "cev_pe_rel",
        "cev_ge_rel",
        "gap_rel",
        "engel",
        "labor_total",
        "capital_rate",
        "capital_stock",
        "dc",
        "df",
        "dshare",
        "infeasible_share",
    ]

    def __init__(self, frame: pd.DataFrame):
        if frame.shape[0] != N_DECILES:
            raise ValueError("*** ERROR *** a decile table needs %d rows" % N_DECILES)
        if np.any(np.diff(frame["y_exp_base"].values) < -1e-12):
            raise ValueError("*** ERROR *** decile expenditures are not sorted")
        self.frame = frame[self.COLUMNS].reset_index(drop=True)

    def __getitem__(self, column):
        return self.frame[column].values

    def __len__(self):
        return N_DECILES


def decile_table(base, alt) -> DecileTable:
    check_comparable(base, alt)
    prefs = base.prefs
    p0, p1 = base.prices.p, alt.prices.p
    d0 = _state_deciles(base)
    d1 = _state_deciles(alt)
    pe = pe_incidence(prefs, p0, p1, base.dist.mass, base.policy.expenditures)
    decomposition = income_decomposition(base, alt)
    cev_ge = welfare_change(prefs, p0, d0["y_exp"], p1, d1["y_exp"])
    frame = pd.DataFrame(
        {
            "decile": np.arange(1, N_DECILES + 1),
            "y_exp_base": d0["y_exp"],
            "y_exp_alt": d1["y_exp"],
            "food_share_base": d0["food_share"],
            "food_share_alt": d1["food_share"],
            "cev_pe": pe["cev_pe"].values,
            "cev_ge": cev_ge,
        }
    )
    frame["gap"] = frame["cev_pe"] - frame["cev_ge"]
    frame["cev_pe_rel"] = frame["cev_pe"] / frame["y_exp_base"]
    frame["cev_ge_rel"] = frame["cev_ge"] / frame["y_exp_base"]
    frame["gap_rel"] = frame["gap"] / frame["y_exp_base"]
    frame["engel"] = pe["engel"].values
    for col in ("labor_total", "capital_rate", "capital_stock"):
        frame[col] = decomposition[col].values
    for col in ("dc", "df", "dshare", "infeasible_share"):
        frame[col] = pe[col].values
    return DecileTable(frame)


def food_share_curve(prefs, p0, p1, mean_expenditure, points=60, upper=3.0) -> pd.DataFrame:
    """food share against expenditures normalized by the base mean, at the
    base and the alternative food price"""
    floor = 1.05 * max(p0, p1) * prefs.f_bar / mean_expenditure
    x = np.linspace(max(floor, 0.05), upper, points)
    y = x * mean_expenditure
    return pd.DataFrame(
        {
            "normalized_expenditure": x,
            "food_share_base": food_share(prefs, p0, y),
            "food_share_alt": food_share(prefs, p1, y),
        }
    )


def check_comparable(base, alt):
    """states must share preferences, income process and asset grid; under
    the natural borrowing limit the first node moves with prices, so only
    the grid size has to agree"""
    problems = []
    if not base.prefs.same_as(alt.prefs):
        problems.append("preferences")
    if not base.income.same_as(alt.income):
        problems.append("income process")
    natural = base.grid.a_lo < 0.0 and alt.grid.a_lo < 0.0
    if natural:
        if base.grid.size != alt.grid.size:
            problems.append("asset grid size")
    elif not base.grid.same_as(alt.grid):
        problems.append("asset grid")
    if problems:
        raise PrimitiveMismatchError(
            "*** ERROR *** steady states differ in: %s" % ", ".join(problems)
        )
