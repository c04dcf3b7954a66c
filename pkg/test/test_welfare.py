from types import SimpleNamespace

import numpy as np
import pytest

from foodgap.common import PrimitiveMismatchError
from foodgap.preferences import Preferences
from foodgap.preferences import welfare_change_pe
from foodgap.production import Prices
from foodgap.household.grid import AssetGrid
from foodgap.analysis.welfare import DecileTable
from foodgap.analysis.welfare import decile_table
from foodgap.analysis.welfare import income_decomposition
from foodgap.analysis.welfare import pe_incidence
from foodgap.analysis.welfare import food_share_curve
from foodgap.analysis.welfare import check_comparable


def make_state(prefs, income, grid, prices, mass=None):
    """duck-typed steady state: households keep their assets"""
    shape = (grid.size, income.n_states)
    if mass is None:
        mass = np.full(shape, 1.0 / np.prod(shape))
    expenditures = (prices.r - 1.0) * grid.nodes[:, None] + prices.w * income.levels[None, :]
    return SimpleNamespace(
        prefs=prefs,
        income=income,
        grid=grid,
        prices=prices,
        dist=SimpleNamespace(mass=mass),
        policy=SimpleNamespace(expenditures=expenditures),
    )


@pytest.fixture
def grid():
    return AssetGrid([0.0, 0.5, 1.0, 2.0, 4.0, 8.0])


@pytest.fixture
def base(prefs, income, grid):
    return make_state(prefs, income, grid, Prices(r=1.02, w=1.0, p=2.49))


@pytest.fixture
def alt(prefs, income, grid):
    return make_state(prefs, income, grid, Prices(r=1.025, w=0.97, p=3.32))


def test_identical_states_compare_to_zero(base):
    decomposition = income_decomposition(base, base)
    for col in ("labor_wage", "labor_mix", "capital_rate", "capital_stock", "income_total"):
        assert np.allclose(decomposition[col], 0.0, atol=1e-15)
    table = decile_table(base, base)
    assert np.allclose(table["cev_pe"], 0.0, atol=1e-14)
    assert np.allclose(table["cev_ge"], 0.0, atol=1e-14)
    assert np.allclose(table["gap"], 0.0, atol=1e-14)


def test_decomposition_is_additive(base, alt):
    decomposition = income_decomposition(base, alt)
    parts = decomposition["labor_total"] + decomposition["capital_rate"] + decomposition["capital_stock"]
    assert np.allclose(parts, decomposition["income_total"], atol=1e-10)
    assert np.all(decomposition["labor_wage"] < 0.0)


def test_zero_asset_decile_has_no_capital_income_change(prefs, income, grid):
    mass = np.zeros((grid.size, income.n_states))
    mass[0, :] = 0.5 * income.stationary
    mass[1:, :] = 0.5 * income.stationary / (grid.size - 1)
    b = make_state(prefs, income, grid, Prices(r=1.02, w=1.0, p=2.49), mass)
    a = make_state(prefs, income, grid, Prices(r=1.025, w=0.97, p=3.32), mass)
    decomposition = income_decomposition(b, a)
    assert decomposition["assets_base"].iloc[0] == 0.0
    assert decomposition["capital_rate"].iloc[0] == 0.0
    assert decomposition["capital_stock"].iloc[0] == 0.0
    assert decomposition["labor_wage"].iloc[0] < 0.0


def test_pe_incidence_without_price_change(prefs, base):
    pe = pe_incidence(prefs, 2.49, 2.49, base.dist.mass, base.policy.expenditures)
    for col in ("dc", "df", "dshare", "cev_pe", "engel", "infeasible_share"):
        assert np.allclose(pe[col], 0.0, atol=1e-14)


def test_pe_incidence_pattern(prefs, base):
    p0, p1 = 2.49, 3.32
    pe = pe_incidence(prefs, p0, p1, base.dist.mass, base.policy.expenditures)
    assert len(pe) == 10
    assert np.allclose(pe["dc"], -prefs.phi * prefs.f_bar * (p1 - p0))
    assert np.all(np.diff(pe["df"]) <= 1e-14)
    assert np.all(pe["dshare"] > 0.0)
    assert np.all(pe["cev_pe"] < 0.0)
    assert pe["cev_pe_rel"].idxmin() == 0
    assert np.all(np.diff(pe["engel"]) >= -1e-14)
    closed_form = welfare_change_pe(prefs, p0, p1, pe["y_exp"].values)
    assert np.allclose(pe["cev_pe"], closed_form, rtol=1e-10, atol=1e-14)


def test_households_priced_out_are_flagged(income, grid):
    prefs = Preferences(f_bar=0.2)
    state = make_state(prefs, income, grid, Prices(r=1.02, w=1.0, p=1.0))
    poorest = float(np.min(state.policy.expenditures))
    p1 = 1.05 * poorest / prefs.f_bar
    pe = pe_incidence(prefs, 1.0, p1, state.dist.mass, state.policy.expenditures)
    assert pe["infeasible_share"].iloc[0] > 0.0
    assert pe["infeasible_share"].iloc[-1] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.isfinite(pe["dc"]))


def test_decile_table(base, alt):
    table = decile_table(base, alt)
    assert list(table.frame.columns) == DecileTable.COLUMNS
    assert len(table) == 10
    assert np.all(np.diff(table["y_exp_base"]) >= 0.0)
    assert np.allclose(table["gap"], table["cev_pe"] - table["cev_ge"])
    assert np.allclose(table["gap_rel"] * table["y_exp_base"], table["gap"])
    with pytest.raises(ValueError):
        DecileTable(table.frame.iloc[:9])


def test_comparable_states(prefs, income, grid, base):
    other = make_state(Preferences(phi=0.7), income, grid, base.prices)
    with pytest.raises(PrimitiveMismatchError):
        check_comparable(base, other)
    moved = make_state(prefs, income, AssetGrid(grid.nodes + 0.1), base.prices)
    with pytest.raises(PrimitiveMismatchError):
        check_comparable(base, moved)
    natural = make_state(prefs, income, AssetGrid(grid.nodes - 1.0), base.prices)
    shifted = make_state(prefs, income, AssetGrid(grid.nodes - 1.1), base.prices)
    check_comparable(natural, shifted)


def test_food_share_curve(prefs):
    curve = food_share_curve(prefs, 2.49, 3.32, 1.0)
    assert list(curve.columns) == ["normalized_expenditure", "food_share_base", "food_share_alt"]
    assert np.all(curve["food_share_alt"] > curve["food_share_base"])
    assert np.all(np.diff(curve["food_share_base"]) < 0.0)
