import numpy as np
import pytest

from foodgap.common import ConfigError
from foodgap.common import SubsistenceError
from foodgap.production import Technology
from foodgap.production import ClimateScenario
from foodgap.production import NAMED_SCENARIOS
from foodgap.production import apply_scenario
from foodgap.production import prices_from_capital
from foodgap.production import prices_from_rate
from foodgap.production import weighted_damage
from foodgap.production import read_regional_damages
from foodgap.production import scenario_from_regions
from foodgap.production import sector_accounts
from foodgap.production import output_shares
from foodgap.production import factor_exhaustion_residual
from foodgap.production import apg_response


def test_no_damage_leaves_technology_unchanged(tech):
    damaged = apply_scenario(tech, ClimateScenario.named("no-damage"))
    assert damaged.g_apg == pytest.approx(tech.g_apg, rel=1e-15)
    assert damaged.a_c == tech.a_c


def test_agricultural_damage_raises_the_gap(tech):
    damaged = apply_scenario(tech, ClimateScenario(xi_f=0.25))
    assert damaged.g_apg == pytest.approx(2.49 / 0.75)
    assert damaged.g_apg == pytest.approx(3.32)


def test_symmetric_damage_keeps_the_gap(tech):
    damaged = apply_scenario(tech, ClimateScenario(xi_f=0.1, xi_c=0.1))
    assert damaged.g_apg == pytest.approx(2.49)
    assert damaged.a_c == pytest.approx(0.9)


def test_prices_from_capital(tech):
    prices = prices_from_capital(tech, 1.0)
    assert prices.r == pytest.approx(1.28)
    assert prices.w == pytest.approx(0.64)
    assert prices.p == pytest.approx(tech.g_apg)
    assert prices_from_capital(tech, 7.0).p == prices.p
    doubled = prices_from_capital(Technology(a_c=2.0), 1.0)
    assert doubled.w == pytest.approx(2.0 * prices.w)
    assert doubled.r - 1.0 + 0.08 == pytest.approx(2.0 * (prices.r - 1.0 + 0.08))
    with pytest.raises(ValueError):
        prices_from_capital(tech, 0.0)


def test_rate_and_capital_are_inverse(tech):
    prices = prices_from_rate(tech, 0.015)
    assert prices.r_net == pytest.approx(0.015, abs=1e-14)
    assert tech.wage_at_rate(0.015) == pytest.approx(prices.w)


def test_weighted_damage_of_the_regional_table():
    table = read_regional_damages()
    assert table["population_share"].sum() == pytest.approx(1.005)
    loss = weighted_damage(zip(table["loss_baseline_pct"], table["population_share"]))
    assert loss == pytest.approx(-24.6, abs=0.5)
    scen = scenario_from_regions(table)
    assert scen.xi_f == pytest.approx(-loss / 100.0)
    assert scen.xi_c == 0.0


def test_weighted_damage_trivial_cases():
    assert weighted_damage([(-12.0, 1.0)]) == pytest.approx(-12.0)
    assert weighted_damage([(-5.0, 0.2), (-5.0, 0.3), (-5.0, 0.1)]) == pytest.approx(-5.0)
    with pytest.raises(ValueError):
        weighted_damage([(-5.0, 0.0), (-3.0, 0.0)])
    with pytest.raises(ValueError):
        weighted_damage([(-5.0, 0.7), (-3.0, 0.7)])


def test_sector_accounts_without_food(tech):
    acc = sector_accounts(tech, 4.0, 1.0, 0.0, 0.5)
    assert acc.l_f == 0.0
    assert acc.y_c == pytest.approx(tech.output_per_worker(4.0))


def test_sector_accounts_symmetric_split():
    tech = Technology(g_apg=1.0)
    k = 3.0
    total = tech.a_f * k**tech.alpha
    acc = sector_accounts(tech, k, 1.0, 0.5 * total, 0.1)
    assert acc.l_f == pytest.approx(0.5)
    assert acc.k_f + acc.k_c == pytest.approx(k)
    shares = output_shares(acc, 1.0)
    assert shares["food"] == pytest.approx(0.5)


def test_sector_accounts_infeasible_food(tech):
    with pytest.raises(SubsistenceError):
        sector_accounts(tech, 1.0, 1.0, 10.0, 0.1)


def test_factors_exhaust_output(tech):
    assert abs(factor_exhaustion_residual(tech, 3.0, 0.4)) < 1e-14


def test_scenarios():
    assert set(NAMED_SCENARIOS) >= {"no-damage", "baseline", "optimistic", "pessimistic"}
    assert ClimateScenario.named("baseline").xi_f == 0.25
    with pytest.raises(ConfigError):
        ClimateScenario.named("apocalypse")
    with pytest.raises(ConfigError):
        ClimateScenario(xi_f=1.0)


def test_apg_response(tech):
    response = apg_response(tech, 0.2, np.linspace(0.0, 1.0, 5))
    assert np.all(np.diff(response["g_apg"].values) > 0.0)
    assert response["food_price_change"].iloc[0] < 0.0
    assert response["food_price_change"].iloc[-1] == pytest.approx(1.0 / 0.8 - 1.0)
