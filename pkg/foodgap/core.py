import copy
import logging
import multiprocessing
from functools import cached_property

import numpy as np

from .common import FoodgapError
from .common import ConfigError
from .common import ConvergenceError
from .common import BracketError
from .common import GridError
from .common import InvariantError
from .common import SubsistenceError
from .common import FoodgapBase
from .common import config_hash
from .preferences import Preferences
from .preferences import demand
from .production import Technology
from .production import ClimateScenario
from .production import apply_scenario
from .production import prices_from_rate
from .production import sector_accounts
from .production import output_shares
from .stochastic import IncomeConfig
from .household.grid import GridConfig
from .household.grid import AssetGrid
from .household.grid import borrowing_limit
from .household.grid import build_grid
from .household.egm import EGMConfig
from .household.egm import egm_solve
from .household.egm import euler_residuals
from .distribution import stationary
from .distribution import aggregate
from .analysis.inequality import gini
from .analysis.inequality import ratio_8020
from .analysis.inequality import wealthless_share
from .analysis.welfare import check_comparable
from .analysis.welfare import decile_table
from .analysis.welfare import income_decomposition

logger = logging.getLogger(__name__)

"""
This file contains the equilibrium layer: the capital-market fixed point,
the steady-state object it produces and the comparison of two steady states.

for r in bisection(r_lo, r_hi):
    prices(r) -> household policy -> stationary distribution -> K supply
    excess demand = K demand(r) - K supply
"""


class SolverConfig(FoodgapBase):
    """equilibrium solver options

    clearing_tol        relative capital-market residual that stops the bisection
    max_bisect          bisection iteration budget
    dist_tol            sup-norm tolerance of the distribution iteration
    dist_max_iter       distribution iteration budget
    rate_margin         distance kept from the open ends of the rate bracket
    natural_rate_floor  lowest net rate tried under the natural borrowing limit
    walras_tol          accepted relative residual in the non-food goods market
    """

    def __init__(
        self,
        clearing_tol: float = 1e-6,
        max_bisect: int = 200,
        dist_tol: float = 1e-13,
        dist_max_iter: int = 200000,
        rate_margin: float = 1e-4,
        natural_rate_floor: float = 1e-3,
        walras_tol: float = 1e-4,
        _stop_at_defaults: bool = False,
    ):
        self.clearing_tol = clearing_tol
        self.max_bisect = max_bisect
        self.dist_tol = dist_tol
        self.dist_max_iter = dist_max_iter
        self.rate_margin = rate_margin
        self.natural_rate_floor = natural_rate_floor
        self.walras_tol = walras_tol
        if _stop_at_defaults:
            return
        for name in ("clearing_tol", "dist_tol", "rate_margin", "walras_tol"):
            if not getattr(self, name) > 0.0:
                raise ConfigError("*** ERROR *** solver option %s must be > 0" % name)
        if max_bisect < 1 or dist_max_iter < 1:
            raise ConfigError("*** ERROR *** iteration budgets must be >= 1")


def feasible_rate_ceiling(tech: Technology, prefs: Preferences, income):
    """highest net rate at which the lowest labor income still pays for
    subsistence food (the wage falls with the rate); None without subsistence"""
    cost = tech.g_apg * prefs.f_bar
    if cost == 0.0:
        return None
    k = (cost / (income.theta_min * tech.a_c * (1.0 - tech.alpha))) ** (1.0 / tech.alpha)
    return tech.a_c * tech.alpha * k ** (tech.alpha - 1.0) - tech.delta


def rate_bracket(tech, prefs, income, grid_config: GridConfig, solver: SolverConfig):
    """admissible net-rate interval inside (-delta, 1/beta - 1)"""
    lo = -tech.delta + solver.rate_margin
    if grid_config.borrowing_mode == "natural":
        lo = max(lo, solver.natural_rate_floor)
    hi = 1.0 / prefs.beta - 1.0 - solver.rate_margin
    ceiling = feasible_rate_ceiling(tech, prefs, income)
    if ceiling is not None:
        hi = min(hi, ceiling - solver.rate_margin)
    if not hi > lo:
        raise SubsistenceError(
            "*** ERROR *** no interest rate lets the lowest income afford subsistence food",
            r_lo=lo, r_ceiling=ceiling, p=tech.g_apg, f_bar=prefs.f_bar,
        )
    return lo, hi


class _GridPlan:
    """the asset grid used at each rate; fixed under the zero limit, moving
    with prices under the natural one"""

    def __init__(self, config: GridConfig, prefs, income, mean_labor_income, grid=None):
        self.config = config
        self.prefs = prefs
        self.income = income
        self.mean_labor_income = mean_labor_income
        self.scale = 1.0
        if grid is None and config.borrowing_mode == "zero":
            grid = build_grid(config, 0.0, mean_labor_income)
        self.grid = grid

    def at(self, prices) -> AssetGrid:
        if self.config.borrowing_mode == "zero":
            return self.grid
        a_lo = borrowing_limit(prices, self.income.theta_min, self.prefs, mode="natural")
        return build_grid(self.config, a_lo, self.scale * self.mean_labor_income)

    def double(self):
        self.scale *= 2.0
        if self.grid is not None:
            self.grid = self.grid.with_a_max(2.0 * self.grid.a_max, self.config.curvature)


class _Evaluation:
    __slots__ = ("r_net", "prices", "grid", "policy", "dist", "aggregates", "k_demand", "excess")

    def __init__(self, **kw):
        for k, v in kw.items():
            setattr(self, k, v)


class _ExcessDemand:
    """capital excess demand as a function of the net rate; keeps the
    previous policy and distribution as warm starts and records iterates"""

    def __init__(self, prefs, tech, income, plan, egm: EGMConfig, solver: SolverConfig):
        self.prefs = prefs
        self.tech = tech
        self.income = income
        self.plan = plan
        self.egm = egm
        self.solver = solver
        self.iterates = []
        self._policy = None
        self._mass = None

    def evaluate(self, r_net: float) -> _Evaluation:
        n = len(self.iterates) + 1
        try:
            prices = prices_from_rate(self.tech, r_net)
            grid = self.plan.at(prices)
            policy = egm_solve(
                self.prefs, prices, self.income, grid,
                tol=self.egm.tol, max_iter=self.egm.max_iter, init=self._policy,
            )
            dist = stationary(
                policy, self.income, grid,
                tol=self.solver.dist_tol, max_iter=self.solver.dist_max_iter, init=self._mass,
            )
            agg = aggregate(dist, grid, self.income, policy, prices, self.prefs)
        except FoodgapError as e:
            raise e.with_context(r_net=r_net, iterate=n)
        self._policy = policy
        self._mass = dist.mass
        k_demand = self.tech.capital_labor_ratio(r_net) * agg.labor
        excess = k_demand - agg.capital
        self.iterates.append(
            {"r_net": r_net, "k_supply": agg.capital, "k_demand": k_demand, "excess": excess}
        )
        logger.info(
            "iterate %3d  r=%.10f  K_s=%.8f  K_d=%.8f  excess=% .3e",
            n, r_net, agg.capital, k_demand, excess,
        )
        return _Evaluation(
            r_net=r_net, prices=prices, grid=grid, policy=policy, dist=dist,
            aggregates=agg, k_demand=k_demand, excess=excess,
        )


def bracket_certificate(iterates) -> dict:
    """closest recorded rates on each side of the root with positive and
    negative excess demand"""
    below = [it for it in iterates if it["excess"] > 0.0]
    above = [it for it in iterates if it["excess"] < 0.0]
    cert = {}
    if below:
        b = max(below, key=lambda it: it["r_net"])
        cert.update(r_below=b["r_net"], excess_below=b["excess"])
    if above:
        a = min(above, key=lambda it: it["r_net"])
        cert.update(r_above=a["r_net"], excess_above=a["excess"])
    return cert


def excess_is_monotone(iterates, rtol: float = 1e-8) -> bool:
    """excess demand nonincreasing in the rate across the recorded iterates"""
    if len(iterates) < 2:
        return True
    pts = sorted((it["r_net"], it["excess"]) for it in iterates)
    excess = np.array([e for _, e in pts])
    slack = rtol * np.max(np.abs(excess))
    return bool(np.all(np.diff(excess) <= slack))


class SteadyState:
    """a solved stationary equilibrium

    `tech` is the damaged technology the economy runs on, `base_tech` the
    undamaged one the scenario was applied to."""

    def __init__(
        self, prefs, base_tech, tech, scenario, income, grid, prices, policy, dist,
        aggregates, k_demand, accounts, diagnostics, iterates,
    ):
        self.prefs = prefs
        self.base_tech = base_tech
        self.tech = tech
        self.scenario = scenario
        self.income = income
        self.grid = grid
        self.prices = prices
        self.policy = policy
        self.dist = dist
        self.aggregates = aggregates
        self.k_demand = k_demand
        self.accounts = accounts
        self.diagnostics = diagnostics
        self.iterates = iterates

    def cell_assets(self):
        return np.broadcast_to(self.grid.nodes[:, None], self.dist.mass.shape)

    def food_expenditures(self):
        bundle = demand(self.prefs, self.prices.p, self.policy.expenditures)
        return self.prices.p * bundle.f

    @cached_property
    def indicators(self) -> dict:
        mass = self.dist.mass
        wealth_gini, shifted = gini(mass, self.cell_assets(), full_output=True)
        return {
            "mean_food_share": self.aggregates.mean_food_share,
            "expenditure_8020": ratio_8020(mass, self.policy.expenditures),
            "food_8020": ratio_8020(mass, self.food_expenditures()),
            "wealth_gini": wealth_gini,
            "gini_shifted": shifted,
            "wealthless_share": wealthless_share(mass, self.cell_assets()),
        }

    def summary(self) -> dict:
        """flat dict of scalars, in a fixed order"""
        agg, acc = self.aggregates, self.accounts
        row = {
            "scenario": self.scenario.name,
            "xi_f": self.scenario.xi_f,
            "xi_c": self.scenario.xi_c,
            "r_net": self.prices.r_net,
            "w": self.prices.w,
            "p": self.prices.p,
            "K": agg.capital,
            "L": agg.labor,
            "Y_f": acc.y_f,
            "Y_c": acc.y_c,
            "C_agg": agg.c_agg,
            "F_agg": agg.f_agg,
            "food_output_share": output_shares(acc, self.prices.p)["food"],
        }
        row.update({k: v for k, v in self.indicators.items() if k != "gini_shifted"})
        for key in ("clearing_residual", "walras_residual", "euler_max", "bisection_iterations"):
            row[key] = self.diagnostics[key]
        row["a_max"] = self.grid.a_max
        return row

    def __repr__(self):
        return "SteadyState(scenario=%r, r_net=%.8f, K=%.6f)" % (
            self.scenario.name, self.prices.r_net, self.aggregates.capital,
        )


def _relative_residual(ev: _Evaluation) -> float:
    return abs(ev.excess) / ev.k_demand


def _clear_capital_market(excess, lo, hi, solver: SolverConfig):
    """bisect the net rate until the relative capital residual is below
    `clearing_tol`, or until the bracket cannot be split in floating point;
    returns the evaluation with the smallest residual and the number of
    bisection steps"""
    at_lo = excess.evaluate(lo)
    at_hi = excess.evaluate(hi)
    if np.sign(at_lo.excess) == np.sign(at_hi.excess) and at_lo.excess != 0.0:
        raise BracketError(
            "*** ERROR *** capital excess demand does not change sign over the rate bracket",
            r_lo=lo, r_hi=hi, excess_lo=at_lo.excess, excess_hi=at_hi.excess,
        )
    best = min(at_lo, at_hi, key=_relative_residual)
    sign_lo = np.sign(at_lo.excess)
    for step in range(solver.max_bisect):
        if _relative_residual(best) <= solver.clearing_tol:
            return best, step
        mid = lo + 0.5 * (hi - lo)
        if not lo < mid < hi:
            logger.warning(
                "rate bracket exhausted at r=%.17g with relative residual %.3e",
                best.r_net, _relative_residual(best),
            )
            return best, step
        ev = excess.evaluate(mid)
        if _relative_residual(ev) <= _relative_residual(best):
            best = ev
        if np.sign(ev.excess) == sign_lo:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        "*** ERROR *** bisection on the interest rate did not converge",
        iterations=solver.max_bisect, r_net=best.r_net,
        clearing_residual=_relative_residual(best),
    )


def _solve_on_plan(prefs, tech, damaged, scenario, income, plan, egm, solver, lo, hi):
    excess = _ExcessDemand(prefs, damaged, income, plan, egm, solver)
    final, n_bisect = _clear_capital_market(excess, lo, hi, solver)
    root = final.r_net
    agg = final.aggregates
    clearing = _relative_residual(final)
    if clearing > solver.clearing_tol:
        raise ConvergenceError(
            "*** ERROR *** capital market does not clear at the bisection root",
            r_net=root, clearing_residual=clearing, tol=solver.clearing_tol,
        )
    monotone = excess_is_monotone(excess.iterates)
    if not monotone:
        logger.warning("excess capital demand is not monotone across bisection iterates")
    accounts = sector_accounts(damaged, final.k_demand, agg.labor, agg.f_agg, agg.c_agg)
    if abs(accounts.walras_residual) > solver.walras_tol:
        raise InvariantError(
            "*** ERROR *** non-food goods market does not clear",
            walras_residual=accounts.walras_residual, r_net=root,
        )
    euler = euler_residuals(final.policy, prefs, final.prices, income, final.grid, at="endogenous")
    diagnostics = {
        "clearing_residual": clearing,
        "walras_residual": accounts.walras_residual,
        "euler_max": float(np.max(np.abs(euler))),
        "bisection_iterations": n_bisect,
        "excess_monotone": monotone,
        "top_node_mass": final.dist.top_node_mass(),
        "egm_iterations": final.policy.iterations,
        "dist_iterations": final.dist.iterations,
        "certificate": bracket_certificate(excess.iterates),
    }
    return SteadyState(
        prefs=prefs, base_tech=tech, tech=damaged, scenario=scenario, income=income,
        grid=final.grid, prices=final.prices, policy=final.policy, dist=final.dist,
        aggregates=agg, k_demand=final.k_demand, accounts=accounts,
        diagnostics=diagnostics, iterates=excess.iterates,
    )


def reference_labor_income(prefs, tech, income, grid_config, solver) -> float:
    """mean labor income at the upper end of the undamaged rate bracket"""
    _, hi = rate_bracket(tech, prefs, income, grid_config, solver)
    return tech.wage_at_rate(hi) * income.mean()


def solve_steady_state(
    prefs: Preferences,
    tech: Technology,
    scenario: ClimateScenario,
    income,
    grid_config: GridConfig = None,
    solver: SolverConfig = None,
    egm: EGMConfig = None,
    grid: AssetGrid = None,
) -> SteadyState:
    """stationary equilibrium of the economy `tech` damaged by `scenario`

    The asset grid comes from the undamaged technology (or `grid`), so every
    scenario solved from the same `tech` shares it. When the top node holds
    more than `grid_config.tail_mass_tol` of the mass, a_max is doubled and
    the equilibrium solved again."""
    grid_config = GridConfig() if grid_config is None else grid_config
    solver = SolverConfig() if solver is None else solver
    egm = EGMConfig() if egm is None else egm
    damaged = apply_scenario(tech, scenario)
    lo, hi = rate_bracket(damaged, prefs, income, grid_config, solver)
    mean_labor = reference_labor_income(prefs, tech, income, grid_config, solver)
    plan = _GridPlan(grid_config, prefs, income, mean_labor, grid=grid)
    logger.info(
        "solving scenario [ %s ]: p=%.6f, rate bracket [%.6f, %.6f]",
        scenario.name, damaged.g_apg, lo, hi,
    )
    for attempt in range(grid_config.max_doublings + 1):
        state = _solve_on_plan(prefs, tech, damaged, scenario, income, plan, egm, solver, lo, hi)
        top = state.diagnostics["top_node_mass"]
        if top <= grid_config.tail_mass_tol:
            state.diagnostics["grid_doublings"] = attempt
            return state
        if attempt == grid_config.max_doublings:
            break
        logger.warning(
            "top asset node holds %.3e of the mass; doubling a_max (now %g)",
            top, state.grid.a_max,
        )
        plan.double()
    raise GridError(
        "*** ERROR *** stationary mass piles up at the top of the asset grid",
        top_node_mass=top, a_max=state.grid.a_max, doublings=grid_config.max_doublings,
    )


class ComparisonReport:
    """differences between two steady states (alt relative to base)

    indicators: level changes of the 80-20 ratios of food and total
    expenditures, of the mean food share, of the wealth Gini and of the
    wealthless share; relative changes of food output, non-food output and
    capital"""

    INDICATORS = ["f8020", "mu_f", "y8020", "gini_w", "wealthless", "dY_f", "dY_c", "dK"]

    def __init__(self, base: SteadyState, alt: SteadyState):
        check_comparable(base, alt)
        self.base_name = base.scenario.name
        self.alt_name = alt.scenario.name
        b, a = base.indicators, alt.indicators
        self.indicators = {
            "f8020": a["food_8020"] - b["food_8020"],
            "mu_f": a["mean_food_share"] - b["mean_food_share"],
            "y8020": a["expenditure_8020"] - b["expenditure_8020"],
            "gini_w": a["wealth_gini"] - b["wealth_gini"],
            "wealthless": a["wealthless_share"] - b["wealthless_share"],
            "dY_f": alt.accounts.y_f / base.accounts.y_f - 1.0,
            "dY_c": alt.accounts.y_c / base.accounts.y_c - 1.0,
            "dK": alt.aggregates.capital / base.aggregates.capital - 1.0,
        }
        self.levels = {"base": base.summary(), "alt": alt.summary()}
        self.deciles = decile_table(base, alt)
        self.decomposition = income_decomposition(base, alt)

    def row(self) -> dict:
        out = {"base": self.base_name, "alt": self.alt_name}
        out.update((k, self.indicators[k]) for k in self.INDICATORS)
        return out

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(abs(v) <= atol for v in self.indicators.values())


def compare(base: SteadyState, alt: SteadyState) -> ComparisonReport:
    return ComparisonReport(base, alt)


def compare_many(base: SteadyState, alts) -> list:
    return [ComparisonReport(base, alt) for alt in alts]


MODEL_GROUPS = ["preferences", "technology", "income", "grid", "egm", "solver", "scenario"]


def _solve_job(args):
    options, scenario_options, nodes = args
    solver = SteadyStateSolver(options)
    grid = None if nodes is None else AssetGrid(nodes)
    return solver.solve(ClimateScenario(**scenario_options), grid=grid)


class SteadyStateSolver:
    """build the model from a nested options dict and solve scenarios

    options = {group: {"values": {option: value}}}, groups as in
    SteadyStateSolver.get_defaults()
    """

    __default_options = {
        "preferences": {"values": Preferences.get_defaults(), "ignore": []},
        "technology": {"values": Technology.get_defaults(), "ignore": []},
        "income": {"values": IncomeConfig.get_defaults(), "ignore": []},
        "grid": {"values": GridConfig.get_defaults(), "ignore": []},
        "egm": {"values": EGMConfig.get_defaults(), "ignore": []},
        "solver": {"values": SolverConfig.get_defaults(), "ignore": []},
        "scenario": {"values": ClimateScenario.get_defaults(), "ignore": []},
        "general": {
            "values": {
                "workers": multiprocessing.cpu_count(),
                "seed": 0,
            },
            "ignore": [],
        },
        "output": {
            "values": {
                "output_dir": ".",
                "plots": True,
            },
            "ignore": [],
        },
    }

    def __init__(self, options: dict = None):
        if options is None:
            options = self.get_defaults(terse=True)
        self.options = options
        values = {group: opt["values"] for group, opt in options.items()}
        self.prefs = Preferences.from_options(values["preferences"])
        self.tech = Technology.from_options(values["technology"])
        self.income_config = IncomeConfig.from_options(values["income"])
        self.grid_config = GridConfig.from_options(values["grid"])
        self.egm = EGMConfig.from_options(values["egm"])
        self.solver = SolverConfig.from_options(values["solver"])
        self.scenario = ClimateScenario.from_options(values["scenario"])
        self.income = self.income_config.build()
        self.workers = int(values["general"]["workers"])
        self.seed = int(values["general"]["seed"])
        if self.workers < 1:
            raise ConfigError("*** ERROR *** workers must be >= 1")

    @classmethod
    def get_defaults(cls, terse=False):
        """return the default option groups; with `terse` the 'ignore'
        entries are dropped, together with the options they list"""
        defaults = copy.deepcopy(cls.__default_options)
        if terse:
            for group, opt in defaults.items():
                ignore = opt.pop("ignore")
                opt["values"] = {k: v for k, v in opt["values"].items() if k not in ignore}
        return defaults

    @classmethod
    def from_config(cls, config: dict):
        return cls(cls.merge_options(config))

    @classmethod
    def merge_options(cls, config: dict) -> dict:
        """user options merged over the terse defaults; unknown groups or
        keys are refused"""
        merged = cls.get_defaults(terse=True)
        _recursive_dict_match(config, merged, path=[])
        return merged

    def config_hash(self) -> str:
        """hash of the model groups; worker count and output settings do not
        change results and are left out"""
        model = {g: opt["values"] for g, opt in self.options.items() if g in MODEL_GROUPS}
        return config_hash(model)

    def income_simulation_gap(self, ts_length: int = 500, num_reps: int = 1000) -> float:
        """Monte Carlo check of the productivity chain, seeded by general.seed"""
        return self.income.simulation_gap(ts_length, num_reps, seed=self.seed)

    def solve(self, scenario: ClimateScenario = None, grid: AssetGrid = None) -> SteadyState:
        scenario = self.scenario if scenario is None else scenario
        return solve_steady_state(
            self.prefs, self.tech, scenario, self.income,
            grid_config=self.grid_config, solver=self.solver, egm=self.egm, grid=grid,
        )

    def solve_many(self, scenarios, workers: int = None) -> list:
        """solve several scenarios on one common asset grid: states whose
        grid had to be enlarged force the others onto the largest grid"""
        workers = self.workers if workers is None else workers
        states = self._map(scenarios, [None] * len(scenarios), workers)
        if self.grid_config.borrowing_mode == "natural":
            return states
        largest = max(states, key=lambda s: s.grid.a_max).grid
        redo = [i for i, s in enumerate(states) if not s.grid.same_as(largest)]
        if redo:
            logger.info("re-solving %d scenario(s) on the enlarged grid (a_max=%g)", len(redo), largest.a_max)
            again = self._map([scenarios[i] for i in redo], [largest] * len(redo), workers)
            for i, state in zip(redo, again):
                states[i] = state
        if any(not s.grid.same_as(largest) for s in states):
            raise GridError("*** ERROR *** scenarios could not be solved on a common grid")
        return states

    def _map(self, scenarios, grids, workers):
        if workers <= 1 or len(scenarios) <= 1:
            return [self.solve(s, grid=g) for s, g in zip(scenarios, grids)]
        jobs = [
            (self.options, s.get_options(), None if g is None else np.array(g.nodes))
            for s, g in zip(scenarios, grids)
        ]
        with multiprocessing.Pool(min(workers, len(jobs))) as pool:
            return list(pool.imap(_solve_job, jobs))

    @staticmethod
    def print_summary(state: SteadyState):
        """print the summary of the steady state"""
        row = state.summary()
        print("\n==============================================")
        print("Steady state [ %s ]" % row["scenario"])
        print("----------------------------------------------")
        print(" net interest rate : %.6f" % row["r_net"])
        print(" wage              : %.6f" % row["w"])
        print(" food price        : %.6f" % row["p"])
        print(" capital           : %.6f" % row["K"])
        print(" mean food share   : %.4f" % row["mean_food_share"])
        print(" 80-20 expenditure : %.3f" % row["expenditure_8020"])
        print(" wealth Gini       : %.4f" % row["wealth_gini"])
        print(" wealthless share  : %.4f" % row["wealthless_share"])
        print("----------------------------------------------")
        print(" clearing residual : %.2e" % row["clearing_residual"])
        print(" Walras residual   : %.2e" % row["walras_residual"])
        print(" Euler max         : %.2e" % row["euler_max"])
        print("==============================================")


def _recursive_dict_match(source: dict, target: dict, path: list) -> None:
    """use an arbitrarily nested dict to change values in an arbitrarily
    nested dict of defaults; keys missing from the defaults are refused"""
    for k, v in source.items():
        if k not in target:
            raise ConfigError(
                "*** ERROR *** unrecognized keyword [ %s ] in [ %s ], allowed: %s"
                % (k, ".".join(path) or "config", sorted(target))
            )
        if isinstance(v, dict) and isinstance(target[k], dict):
            _recursive_dict_match(v, target[k], path + [k])
        else:
            target[k] = v
