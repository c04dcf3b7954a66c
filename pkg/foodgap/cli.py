import os
import sys
import logging
import argparse

import numpy as np
import pandas as pd

from .common import FoodgapError
from .common import ConfigError
from .common import PrimitiveMismatchError
from .core import SteadyStateSolver
from .core import MODEL_GROUPS
from .core import compare_many
from .production import ClimateScenario
from .production import NAMED_SCENARIOS
from .production import apg_response
from .analysis.welfare import food_share_curve
from .calibration import ExpenditureSegments
from .calibration import estimate_preferences
from .calibration import calibrate_spread
from .calibration import calibration_report
from .calibration import SPREAD_PARAMETERS
from .scenarios import ALLOCATIONS
from .scenarios import DEFAULT_LOSSES
from .scenarios import sweep_allocation
from .storage import ReportStorage
from .storage import read_config
from .storage import write_config
from .storage import snapshot
from .storage import SNAPSHOT_INDENT
from . import figures

__doc__ = """
This file contains all the information related to the CLI.
Command-line options are defined here, together with their description. All
options are initialized to the default values of the corresponding classes.
"""

logger = logging.getLogger(__name__)

"""These are the tags (prefixes) that get automatically prepended to all options
pertaining a given group of the SteadyStateSolver options.
"""
tags = {
    "preferences": "pref_",
    "technology": "tech_",
    "income": "inc_",
    "grid": "grid_",
    "egm": "egm_",
    "solver": "sol_",
    "scenario": "scen_",
    "general": "",
    "output": "",
}
tags_reverse = {v[:-1]: k for k, v in tags.items() if v}

description = """
DESCRIPTION
Stationary equilibria of an incomplete-markets economy with subsistence food
demand, solved with and without climate damages to sector productivities,
and compared across the expenditure distribution.
"""

epilog = """
exit codes: 0 success, 2 config/usage, 3 subsistence, 4 convergence,
5 bracket, 6 grid, 7 primitive mismatch, 8 invariant
"""

defaults = SteadyStateSolver.get_defaults(terse=True)


def _str2bool(value: str) -> bool:
    value = value.lower()
    if value in ("y", "yes", "t", "true", "on", "1"):
        return True
    if value in ("n", "no", "f", "false", "off", "0"):
        return False
    raise argparse.ArgumentTypeError("invalid truth value [ %s ]" % value)


def _option(group, name, help_text, metavar=None, choices=None, type_=None):
    default = defaults[group]["values"][name]
    if type_ is None:
        if isinstance(default, bool):
            type_ = _str2bool
        elif default is None:
            type_ = str
        else:
            type_ = type(default)
    settings = {
        "help": "%s [ default: %s ]" % (help_text, default),
        "action": "store",
        "required": False,
        "type": type_,
        "default": argparse.SUPPRESS,
    }
    if metavar is not None:
        settings["metavar"] = metavar
    if choices is not None:
        settings["choices"] = choices
    return settings


cli_options = {
    "preferences": {
        "description": "household preferences",
        "values": {
            "--pref_phi": _option("preferences", "phi", "non-food weight in utility", "PHI"),
            "--pref_f_bar": _option("preferences", "f_bar", "subsistence food quantity (model units)", "F_BAR"),
            "--pref_eta": _option("preferences", "eta", "coefficient of relative risk aversion (!= 1)", "ETA"),
            "--pref_beta": _option("preferences", "beta", "discount factor", "BETA"),
        },
    },
    "technology": {
        "description": "production technology of the undamaged economy",
        "values": {
            "--tech_alpha": _option("technology", "alpha", "capital share", "ALPHA"),
            "--tech_delta": _option("technology", "delta", "depreciation rate", "DELTA"),
            "--tech_a_c": _option("technology", "a_c", "non-food TFP", "A_C"),
            "--tech_g_apg": _option("technology", "g_apg", "agricultural productivity gap a_c/a_f", "GAP"),
        },
    },
    "income": {
        "description": "idiosyncratic labor productivity (AR(1) in logs)",
        "values": {
            "--inc_rho": _option("income", "rho", "persistence", "RHO"),
            "--inc_sigma": _option("income", "sigma", "innovation spread", "SIGMA"),
            "--inc_n_states": _option("income", "n_states", "number of Markov states", "N"),
            "--inc_n_types": _option("income", "n_types", "number of permanent productivity types", "N"),
            "--inc_type_spread": _option("income", "type_spread", "log spread of the permanent types", "S"),
            "--inc_floor": _option("income", "floor", "common productivity floor", "F"),
        },
    },
    "grid": {
        "description": "asset grid",
        "values": {
            "--grid_size": _option("grid", "size", "number of asset nodes", "M"),
            "--grid_a_max_multiple": _option("grid", "a_max_multiple", "top node in units of mean labor income", "X"),
            "--grid_curvature": _option("grid", "curvature", "exponential spacing of the nodes", "X"),
            "--grid_borrowing_mode": _option(
                "grid", "borrowing_mode", "borrowing limit", choices=["zero", "natural"]
            ),
            "--grid_natural_buffer": _option(
                "grid", "natural_buffer", "distance of the first node from the natural limit, as a fraction", "X"
            ),
            "--grid_tail_mass_tol": _option("grid", "tail_mass_tol", "mass allowed in the top node", "TOL"),
            "--grid_max_doublings": _option("grid", "max_doublings", "automatic doublings of the top node", "N"),
        },
    },
    "egm": {
        "description": "household problem solver",
        "values": {
            "--egm_tol": _option("egm", "tol", "sup-norm tolerance on the expenditure policy", "TOL"),
            "--egm_max_iter": _option("egm", "max_iter", "iteration budget", "N"),
        },
    },
    "solver": {
        "description": "equilibrium solver",
        "values": {
            "--sol_clearing_tol": _option("solver", "clearing_tol", "relative capital-market residual", "TOL"),
            "--sol_max_bisect": _option("solver", "max_bisect", "bisection iteration budget", "N"),
            "--sol_dist_tol": _option("solver", "dist_tol", "distribution iteration tolerance", "TOL"),
            "--sol_dist_max_iter": _option("solver", "dist_max_iter", "distribution iteration budget", "N"),
            "--sol_rate_margin": _option("solver", "rate_margin", "distance from the rate bracket ends", "X"),
            "--sol_natural_rate_floor": _option(
                "solver", "natural_rate_floor", "lowest net rate under the natural limit", "R"
            ),
            "--sol_walras_tol": _option("solver", "walras_tol", "non-food goods market residual", "TOL"),
        },
    },
    "scenario": {
        "description": "climate damages (TFP loss fractions)",
        "values": {
            "--scen_xi_f": _option("scenario", "xi_f", "agricultural TFP loss", "XI"),
            "--scen_xi_c": _option("scenario", "xi_c", "non-food TFP loss", "XI"),
            "--scen_name": _option("scenario", "name", "label used in reports", "NAME"),
        },
    },
    "general": {
        "description": "general options for the calculation setup",
        "values": {
            "--workers": _option("general", "workers", "worker processes for independent steady states", "PROC_NUM"),
            "--seed": _option("general", "seed", "random seed (simulation checks only)", "SEED"),
        },
    },
    "output": {
        "description": "where and what to write",
        "values": {
            "--output_dir": _option("output", "output_dir", "directory for all outputs", "DIR"),
            "--plots": _option("output", "plots", "render SVG figures", "TRUE|FALSE"),
        },
    },
}


"""these are extra options providing convenient CLI functionalities that are
absent in the SteadyStateSolver"""
extra_options = {
    "--config_file": {
        "help": (
            "specify a JSON config file to read to configure the model;"
            " additional command-line options supersede the config file values; "
            "a template can be generated using the '--save_config_template' option"
        ),
        "action": "store",
        "metavar": "CONFIG_FILE.JSON",
        "required": False,
        "type": str,
        "default": argparse.SUPPRESS,
    },
    "--save_config_template": {
        "help": (
            "save a template file containing all configuration options with their "
            "default values, to be customized and used with the '--config_file' option. "
            "If the file exists, the program will cowardly refuse to overwrite it"
        ),
        "action": "store",
        "metavar": "CONFIG_FILE.JSON",
        "required": False,
        "type": str,
        "default": argparse.SUPPRESS,
    },
    "--no_plots": {
        "help": "do not render SVG figures (CSV tables are always written)",
        "action": "store_const",
        "const": True,
        "default": False,
    },
    "--verbose": {
        "help": "log every solver iterate",
        "action": "store_const",
        "const": True,
        "default": False,
    },
    "--quiet": {
        "help": "suppress logging below errors and the final summary",
        "action": "store_const",
        "const": True,
        "default": False,
    },
    "--overwrite": {
        "help": "overwrite output files, if they exist",
        "action": "store_const",
        "const": True,
        "default": False,
    },
}

"""options of each subcommand"""
command_options = {
    "solve": {
        "--scenario": {
            "help": "named scenario, overriding the scenario block; valid: %s" % ", ".join(sorted(NAMED_SCENARIOS)),
            "choices": sorted(NAMED_SCENARIOS),
            "default": None,
        },
    },
    "compare": {
        "--base": {
            "help": "named base scenario [ default: no-damage ]",
            "choices": sorted(NAMED_SCENARIOS),
            "default": "no-damage",
        },
        "--scenarios": {
            "help": "named alternative scenarios [ default: baseline ]",
            "nargs": "+",
            "choices": sorted(NAMED_SCENARIOS),
            "default": None,
        },
        "--alt_config_file": {
            "help": "config of the alternative economy; must differ from the base config in the scenario block only",
            "metavar": "CONFIG_FILE.JSON",
            "default": None,
        },
    },
    "sweep-allocation": {
        "--losses": {
            "help": "cumulative productivity losses [ default: %s ]" % DEFAULT_LOSSES,
            "nargs": "+",
            "type": float,
            "default": None,
        },
        "--allocations": {
            "help": "allocations of the loss across sectors [ default: all ]",
            "nargs": "+",
            "choices": ALLOCATIONS,
            "default": None,
        },
    },
    "calibrate": {
        "--segments": {
            "help": "expenditure segment CSV [ default: packaged example ]",
            "metavar": "SEGMENTS.CSV",
            "default": None,
        },
        "--p_data": {"help": "observed food price normalization [ default: 1.0 ]", "type": float, "default": 1.0},
        "--mean_expenditure": {
            "help": "data currency per model expenditure unit [ default: 1.0 ]",
            "type": float,
            "default": 1.0,
        },
        "--unweighted": {
            "help": "ordinary instead of population-weighted least squares",
            "action": "store_const",
            "const": True,
            "default": False,
        },
        "--target_8020": {
            "help": "also calibrate the income spread to this 80-20 expenditure ratio",
            "type": float,
            "default": None,
        },
        "--spread_parameter": {
            "help": "income option that is calibrated [ default: type_spread ]",
            "choices": list(SPREAD_PARAMETERS),
            "default": "type_spread",
        },
        "--spread_bracket": {
            "help": "search interval for the calibrated spread [ default: per parameter ]",
            "nargs": 2,
            "type": float,
            "metavar": ("LO", "HI"),
            "default": None,
        },
    },
}

COMMANDS = list(command_options)


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Configure logging based on verbosity settings."""
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.DEBUG
    else:
        level = logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
    )


def create_parser() -> argparse.ArgumentParser:
    """one subparser per command, each carrying every model option group"""
    parser = argparse.ArgumentParser(
        description=description, epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command, options in command_options.items():
        sub = subparsers.add_parser(command, description=description, epilog=epilog)
        own = sub.add_argument_group(command.upper(), "%s options" % command)
        for name, settings in options.items():
            own.add_argument(name, **settings)
        for group_name, group_info in cli_options.items():
            group = sub.add_argument_group(group_name.upper(), group_info["description"])
            for name, settings in group_info["values"].items():
                group.add_argument(name, **settings)
            if group_name == "general":
                for k, v in extra_options.items():
                    group.add_argument(k, **v)
    return parser


def _dest_to_option(dest: str):
    """map an argparse dest back to (group, option name)"""
    for group, info in cli_options.items():
        for name in info["values"]:
            if name[2:] == dest:
                tag = tags[group]
                return group, dest[len(tag):]
    return None, None


def _file_options(fname: str) -> dict:
    """config file {group: {option: value}} in SteadyStateSolver form"""
    data = read_config(fname)
    out = {}
    for group, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError("*** ERROR *** config group [ %s ] must be a JSON object" % group)
        out[group] = {"values": values}
    return out


def build_options(args: argparse.Namespace, config_file: str = None) -> dict:
    """defaults, then the config file, then command-line options"""
    merged = SteadyStateSolver.merge_options(_file_options(config_file) if config_file else {})
    for dest, value in vars(args).items():
        group, name = _dest_to_option(dest)
        if group is not None:
            merged[group]["values"][name] = value
    if getattr(args, "no_plots", False):
        merged["output"]["values"]["plots"] = False
    return merged


def template_options() -> dict:
    """the config template: terse defaults without the 'values' level"""
    return {group: opt["values"] for group, opt in SteadyStateSolver.get_defaults(terse=True).items()}


def check_same_model(base: dict, alt: dict) -> None:
    """two configs may differ in their scenario block only"""
    diff = [g for g in MODEL_GROUPS if g != "scenario" and base[g]["values"] != alt[g]["values"]]
    if diff:
        raise PrimitiveMismatchError(
            "*** ERROR *** base and alternative configs differ outside the scenario block: %s"
            % ", ".join(diff)
        )


class FoodgapCLI:
    """working instance of the command line interface:
    - generate CLI options for all options 'published' by the SteadyStateSolver
    - read/write JSON config files
    - run the requested command, writing its tables (and figures)
    """

    def __init__(self, argv=None):
        self.parser = create_parser()
        self.args = self.parser.parse_args(argv)
        self.quiet = self.args.quiet
        self.storage = None

    def run(self) -> int:
        args = self.args
        if getattr(args, "save_config_template", None) is not None:
            fname = args.save_config_template
            if os.path.exists(fname):
                raise ConfigError(
                    "*** ERROR *** cannot save config template, file [%s] already exists. "
                    "Cowardly refusing to overwrite it." % fname
                )
            write_config(fname, template_options())
            return 0
        options = build_options(args, getattr(args, "config_file", None))
        self.solver = SteadyStateSolver(options)
        out = options["output"]["values"]
        self.plots = bool(out["plots"])
        self.storage = ReportStorage(
            output_dir=out["output_dir"], overwrite=args.overwrite, config_hash=self.solver.config_hash()
        )
        command = getattr(self, "cmd_" + args.command.replace("-", "_"))
        command()
        if not self.quiet:
            print("\nwritten:\n  %s" % "\n  ".join(self.storage.written))
        return 0

    def cmd_solve(self):
        scenario = None
        if self.args.scenario is not None:
            scenario = ClimateScenario.named(self.args.scenario)
        self.storage.check_available(["summary.csv", "iterates.csv", "snapshot.json"])
        state = self.solver.solve(scenario)
        row = state.summary()
        row["income_simulation_gap"] = self.solver.income_simulation_gap()
        logger.info("simulated productivity frequencies within %.2e of the stationary law", row["income_simulation_gap"])
        self.storage.write_table("summary", pd.DataFrame([row]), units="model units")
        self.storage.write_table(
            "iterates", pd.DataFrame(state.iterates), units="net rate; capital in model units"
        )
        self.storage.write_json("snapshot", snapshot(state), indent=SNAPSHOT_INDENT)
        if not self.quiet:
            self.solver.print_summary(state)

    def _alt_solver(self):
        """solver of the alternative economy given by --alt_config_file, or None"""
        if self.args.alt_config_file is None:
            return None
        alt_options = build_options(self.args, self.args.alt_config_file)
        check_same_model(self.solver.options, alt_options)
        return SteadyStateSolver(alt_options)

    def _alt_states(self, base_scenario, alt_solver):
        if alt_solver is not None:
            base = self.solver.solve(base_scenario)
            alt = alt_solver.solve(alt_solver.scenario, grid=base.grid)
            return base, [alt]
        names = self.args.scenarios or ["baseline"]
        scenarios = [base_scenario] + [ClimateScenario.named(n) for n in names]
        states = self.solver.solve_many(scenarios)
        return states[0], states[1:]

    def cmd_compare(self):
        base_scenario = ClimateScenario.named(self.args.base)
        alt_solver = self._alt_solver()
        if alt_solver is not None:
            names = [alt_solver.scenario.name]
        else:
            names = self.args.scenarios or ["baseline"]
        outputs = ["comparison.csv", "welfare_gaps.csv"]
        for name in names:
            outputs += ["deciles_%s.csv" % name, "decomposition_%s.csv" % name, "food_share_curve_%s.csv" % name]
        self.storage.check_available(outputs)
        base, alts = self._alt_states(base_scenario, alt_solver)
        reports = compare_many(base, alts)
        self.storage.write_table(
            "comparison",
            pd.DataFrame([r.row() for r in reports]),
            units="80-20 ratios, food share, Gini, wealthless share: level changes; dY_f, dY_c, dK: relative changes",
        )
        gaps = pd.DataFrame({"decile": np.arange(1, 11)})
        for alt, report in zip(alts, reports):
            name = alt.scenario.name
            self.storage.write_table(
                "deciles_%s" % name, report.deciles.frame,
                units="expenditures and welfare in model units; *_rel as fractions of base expenditures",
            )
            self.storage.write_table(
                "decomposition_%s" % name, report.decomposition, units="income changes in model units"
            )
            curve = food_share_curve(base.prefs, base.prices.p, alt.prices.p, base.aggregates.expenditures)
            self.storage.write_table(
                "food_share_curve_%s" % name, curve, units="expenditures relative to the base mean; shares"
            )
            gaps[name] = report.deciles["gap_rel"]
            if self.plots:
                self._figure(figures.plot_income_decomposition, report.decomposition, "decomposition_%s" % name)
                self._figure(figures.plot_welfare, report.deciles, "welfare_%s" % name)
                self._figure(figures.plot_food_share_curve, curve, "food_share_curve_%s" % name)
        self.storage.write_table("welfare_gaps", gaps, units="PE minus GE welfare change, fraction of base expenditures")
        if not self.quiet:
            for report in reports:
                print_comparison(report)

    def cmd_sweep_allocation(self):
        self.storage.check_available(["sweep.csv", "apg_response.csv"])
        panel = sweep_allocation(self.solver, losses=self.args.losses, allocations=self.args.allocations)
        self.storage.write_table("sweep", panel, units="indicator levels and changes against no damage")
        losses = self.args.losses or DEFAULT_LOSSES
        response = apg_response(self.solver.tech, max(losses), np.linspace(0.0, 1.0, 11))
        self.storage.write_table("apg_response", response, units="productivity gap; food price change as fraction")
        if self.plots:
            self._figure(figures.plot_sweep, panel, "sweep")
            self._figure(figures.plot_apg, response, "apg_response")
        failed = panel[panel["status"] != "ok"]
        if len(failed):
            logger.warning("%d sweep point(s) failed", len(failed))

    def cmd_calibrate(self):
        args = self.args
        self.storage.check_available(["calibration.csv"])
        segments = ExpenditureSegments.read(args.segments)
        estimate = estimate_preferences(
            segments, p_data=args.p_data, mean_expenditure=args.mean_expenditure, weighted=not args.unweighted
        )
        spread = None
        if args.target_8020 is not None:
            options = self.solver.options
            bracket = None if args.spread_bracket is None else tuple(args.spread_bracket)
            spread = calibrate_spread(
                args.target_8020, options=options, parameter=args.spread_parameter, bracket=bracket
            )
        self.storage.write_table("calibration", calibration_report(estimate, spread), units="model units")
        if not self.quiet:
            print("\n==============================================")
            print("Calibration")
            print("----------------------------------------------")
            print(" phi    : %.6f  (se %.2e)" % (estimate.phi, estimate.intercept_se))
            print(" f_bar  : %.6f" % estimate.f_bar)
            print(" R2     : %.6f" % estimate.rsquared)
            if spread is not None:
                print(
                    " %-6s : %.6f -> 80-20 %.3f (target %.3f)"
                    % (spread.parameter, spread.value, spread.achieved, spread.target)
                )
            print("==============================================")

    def _figure(self, plot, data, basename):
        fname = self.storage.generate_filename(basename, "svg")
        plot(data, fname)
        self.storage.written.append(fname)


def print_comparison(report):
    """print the summary of a comparison"""
    print("\n==============================================")
    print("Comparison [ %s ] -> [ %s ]" % (report.base_name, report.alt_name))
    print("----------------------------------------------")
    for key in report.INDICATORS:
        print(" %-10s : % .6f" % (key, report.indicators[key]))
    print("==============================================")


def main(argv=None) -> int:
    """entry point; returns the exit code"""
    cli = FoodgapCLI(argv)
    setup_logging(cli.args.verbose, cli.args.quiet)
    try:
        return cli.run()
    except FoodgapError as exc:
        logger.error(str(exc))
        if cli.storage is not None:
            cli.storage.write_error(exc)
        return exc.exit_code
    except FileExistsError as exc:
        logger.error(str(exc))
        return ConfigError.exit_code
    except KeyboardInterrupt:
        print("\ninterrupted by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())
