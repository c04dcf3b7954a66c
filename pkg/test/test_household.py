import numpy as np
import pytest

from foodgap.common import ConfigError
from foodgap.common import ConvergenceError
from foodgap.common import SubsistenceError
from foodgap.preferences import Preferences
from foodgap.preferences import indirect_utility
from foodgap.production import Prices
from foodgap.production import prices_from_rate
from foodgap.stochastic import IncomeConfig
from foodgap.stochastic import IncomeProcess
from foodgap.household.grid import AssetGrid
from foodgap.household.grid import GridConfig
from foodgap.household.grid import borrowing_limit
from foodgap.household.grid import build_grid
from foodgap.household.egm import egm_solve
from foodgap.household.egm import euler_residuals


def test_exponential_grid():
    grid = AssetGrid.exponential(-0.5, 12.0, 40, 4.0)
    assert grid.size == 40
    assert grid.a_lo == -0.5
    assert grid.a_max == 12.0
    assert np.all(np.diff(grid.nodes) > 0.0)
    # nodes crowd near the limit
    assert grid.nodes[1] - grid.nodes[0] < grid.nodes[-1] - grid.nodes[-2]
    wider = grid.with_a_max(24.0, 4.0)
    assert wider.a_lo == grid.a_lo and wider.a_max == 24.0
    assert not grid.same_as(wider)
    with pytest.raises(ValueError):
        AssetGrid([0.0, 1.0, 1.0])


def test_grid_config_validation():
    with pytest.raises(ConfigError):
        GridConfig(borrowing_mode="generous")
    with pytest.raises(ConfigError):
        GridConfig(size=2)


def test_borrowing_limits(prefs):
    prices = Prices(r=1.04, w=0.64, p=3.32)
    assert borrowing_limit(prices, 0.3, prefs, mode="zero") == 0.0
    assert borrowing_limit(prices, 0.3, prefs, mode="natural") == pytest.approx(-0.1188, abs=1e-4)
    no_food = Preferences(f_bar=0.0)
    assert borrowing_limit(prices, 0.3, no_food, mode="natural") == pytest.approx(0.192 / -0.04)
    with pytest.raises(SubsistenceError):
        borrowing_limit(Prices(r=1.04, w=0.1, p=3.32), 0.3, prefs, mode="natural")


def test_natural_grid_starts_above_the_limit():
    config = GridConfig(size=50, borrowing_mode="natural", natural_buffer=0.01)
    grid = build_grid(config, -1.0, 1.0)
    assert grid.a_lo == pytest.approx(-0.99)
    assert grid.a_max == pytest.approx(config.a_max_multiple)


@pytest.fixture
def solved(prefs, two_state_income, small_grid):
    prices = Prices(r=1.02, w=1.0, p=2.49)
    policy = egm_solve(prefs, prices, two_state_income, small_grid, tol=1e-10)
    return prices, policy


def test_euler_equation_holds(prefs, two_state_income, small_grid, solved):
    prices, policy = solved
    at_endogenous = euler_residuals(policy, prefs, prices, two_state_income, small_grid, at="endogenous")
    assert np.max(np.abs(at_endogenous)) < 1e-6
    at_nodes = euler_residuals(policy, prefs, prices, two_state_income, small_grid, at="nodes")
    constrained = policy.constrained(small_grid)
    assert constrained.any()
    assert np.all(at_nodes[constrained] >= -1e-3)


def test_policy_shape(prefs, two_state_income, small_grid, solved):
    prices, policy = solved
    assert policy.budget_residual(small_grid, two_state_income) < 1e-12
    assert np.all(np.diff(policy.savings, axis=0) >= -1e-12)
    assert np.all(np.diff(policy.savings, axis=1) >= -1e-12)
    assert np.all(policy.expenditures > prices.p * prefs.f_bar)


def test_higher_food_price_raises_savings(prefs, two_state_income, small_grid):
    cheap = egm_solve(prefs, Prices(r=1.02, w=1.0, p=2.49), two_state_income, small_grid)
    dear = egm_solve(prefs, Prices(r=1.02, w=1.0, p=3.32), two_state_income, small_grid)
    assert np.all(dear.savings >= cheap.savings - 1e-6)


def test_food_price_irrelevant_without_subsistence(two_state_income, small_grid):
    prefs = Preferences(f_bar=0.0)
    one = egm_solve(prefs, Prices(r=1.02, w=1.0, p=1.0), two_state_income, small_grid)
    other = egm_solve(prefs, Prices(r=1.02, w=1.0, p=3.0), two_state_income, small_grid)
    assert np.allclose(one.savings, other.savings, atol=1e-8)


def test_deterministic_permanent_income(prefs):
    income = IncomeProcess([1.0], [[1.0]])
    grid = AssetGrid.exponential(0.0, 20.0, 60, 2.0)
    prices = Prices(r=1.0 / prefs.beta, w=1.0, p=1.0)
    policy = egm_solve(prefs, prices, income, grid, tol=1e-11, max_iter=20000)
    interior = slice(0, grid.size - 1)
    y_next = policy.expenditures_at(grid, policy.savings[interior, 0], 0)
    assert np.allclose(y_next, policy.expenditures[interior, 0], rtol=1e-6)


def test_unbounded_savings_rejected(prefs, two_state_income, small_grid):
    with pytest.raises(ConvergenceError):
        egm_solve(prefs, Prices(r=1.03, w=1.0, p=1.0), two_state_income, small_grid)


def test_unaffordable_subsistence_rejected(prefs, two_state_income, small_grid):
    with pytest.raises(SubsistenceError):
        egm_solve(prefs, Prices(r=1.02, w=0.05, p=3.32), two_state_income, small_grid)


def _value_function_iteration(prefs, prices, income, grid, tol=1e-11):
    nodes = grid.nodes
    resources = prices.r * nodes[:, None] + prices.w * income.levels[None, :]
    # (a, theta, a') expenditures; infeasible choices get -inf utility
    y = resources[:, :, None] - nodes[None, None, :]
    feasible = y > prices.p * prefs.f_bar
    flow = np.full(y.shape, -np.inf)
    flow[feasible] = indirect_utility(prefs, prices.p, y[feasible])
    value = np.zeros((grid.size, income.n_states))
    for _ in range(20000):
        continuation = value @ income.transition.T
        candidate = flow + prefs.beta * continuation.T[None, :, :]
        new_value = candidate.max(axis=2)
        if np.max(np.abs(new_value - value)) < tol:
            break
        value = new_value
    return candidate.argmax(axis=2)


def test_matches_value_function_iteration(prefs, two_state_income):
    grid = AssetGrid.exponential(0.0, 8.0, 20, 1.0)
    prices = Prices(r=1.02, w=1.0, p=2.49)
    policy = egm_solve(prefs, prices, two_state_income, grid, tol=1e-10)
    choice = _value_function_iteration(prefs, prices, two_state_income, grid)
    widths = np.diff(grid.nodes)
    cell = np.maximum(
        widths[np.clip(choice - 1, 0, widths.shape[0] - 1)],
        widths[np.clip(choice, 0, widths.shape[0] - 1)],
    )
    assert np.all(np.abs(policy.savings - grid.nodes[choice]) <= cell + 1e-12)


def test_euler_equation_on_the_default_grid(prefs, tech):
    income = IncomeConfig().build()
    prices = prices_from_rate(tech, 0.02)
    grid = build_grid(GridConfig(), 0.0, prices.w * income.mean())
    assert grid.size == 200
    policy = egm_solve(prefs, prices, income, grid, tol=1e-10)
    residuals = euler_residuals(policy, prefs, prices, income, grid, at="endogenous")
    assert np.max(np.abs(residuals)) < 1e-6
