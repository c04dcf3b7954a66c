import logging
import multiprocessing

import numpy as np
import pandas as pd

from .common import FoodgapError
from .common import ConfigError
from .core import SteadyStateSolver
from .household.grid import AssetGrid
from .production import ClimateScenario
from .production import output_shares

logger = logging.getLogger(__name__)

ALLOCATIONS = ["ag-only", "symmetric", "nonag-only"]
DEFAULT_LOSSES = [0.10, 0.15, 0.20, 0.25]
SWEEP_INDICATORS = ["wealth_gini", "expenditure_8020", "wealthless_share"]


def allocation_scenarios(loss: float, allocation: str, nonfood_share: float) -> ClimateScenario:
    """scenario for a cumulative productivity loss `loss`

    ag-only     agriculture alone loses `loss`
    nonag-only  the rest of the economy loses `loss`, weighted by its
                output share `nonfood_share`
    symmetric   both sectors lose the weighted loss
    """
    if allocation not in ALLOCATIONS:
        raise ConfigError(
            "*** ERROR *** the specified allocation [ %s ] is not valid. Valid allocations are: %s"
            % (allocation, ", ".join(ALLOCATIONS))
        )
    if not 0.0 <= nonfood_share <= 1.0:
        raise ConfigError("*** ERROR *** non-food output share must be in [0,1]")
    weighted = loss * nonfood_share
    xi_f, xi_c = {
        "ag-only": (loss, 0.0),
        "nonag-only": (0.0, weighted),
        "symmetric": (weighted, weighted),
    }[allocation]
    return ClimateScenario(xi_f=xi_f, xi_c=xi_c, name="%s@%g" % (allocation, loss))


def _sweep_cell(args):
    """solve one sweep point; failures come back as records"""
    options, scenario_options, nodes = args
    row = {"xi_f": scenario_options["xi_f"], "xi_c": scenario_options["xi_c"]}
    try:
        state = SteadyStateSolver(options).solve(
            ClimateScenario(**scenario_options), grid=AssetGrid(nodes)
        )
    except FoodgapError as exc:
        logger.warning("sweep point [ %s ] failed: %s", scenario_options["name"], exc)
        row.update(status="failed", error="%s: %s" % (exc.__class__.__name__, exc.message))
        row.update({k: np.nan for k in SWEEP_INDICATORS})
        return row
    row.update(status="ok", error="")
    row.update({k: state.indicators[k] for k in SWEEP_INDICATORS})
    return row


def sweep_allocation(solver, losses=None, allocations=None, workers: int = None, base=None):
    """indicator panel over loss sizes and allocations

    Indicators are reported in levels and as changes against the no-damage
    steady state `base` (solved here when not given). Every point runs on
    the base state's asset grid; a failing point is recorded and the sweep
    goes on."""
    losses = DEFAULT_LOSSES if losses is None else list(losses)
    allocations = ALLOCATIONS if allocations is None else list(allocations)
    if any(not 0.0 <= loss < 1.0 for loss in losses):
        raise ConfigError("*** ERROR *** losses must be in [0,1)")
    workers = solver.workers if workers is None else workers
    if base is None:
        base = solver.solve(ClimateScenario.named("no-damage"))
    nonfood_share = output_shares(base.accounts, base.prices.p)["nonfood"]
    logger.info("non-food output share of the base state: %.4f", nonfood_share)
    cells = [(loss, a, allocation_scenarios(loss, a, nonfood_share)) for a in allocations for loss in losses]
    nodes = np.array(base.grid.nodes)
    jobs = [(solver.options, scen.get_options(), nodes) for _, _, scen in cells]
    if workers <= 1:
        rows = [_sweep_cell(job) for job in jobs]
    else:
        with multiprocessing.Pool(min(workers, len(jobs))) as pool:
            rows = list(pool.imap(_sweep_cell, jobs))
    for (loss, allocation, _), row in zip(cells, rows):
        row["loss"] = loss
        row["allocation"] = allocation
        for k in SWEEP_INDICATORS:
            row["d_" + k] = row[k] - base.indicators[k]
    columns = ["allocation", "loss", "xi_f", "xi_c", "status"]
    columns += SWEEP_INDICATORS + ["d_" + k for k in SWEEP_INDICATORS] + ["error"]
    return pd.DataFrame(rows, columns=columns)
