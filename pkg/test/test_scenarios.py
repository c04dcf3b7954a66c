import numpy as np
import pytest

from foodgap.common import ConfigError
from foodgap.core import SteadyStateSolver
from foodgap.production import ClimateScenario
from foodgap.scenarios import ALLOCATIONS
from foodgap.scenarios import allocation_scenarios
from foodgap.scenarios import sweep_allocation
from foodgap.scenarios import SWEEP_INDICATORS


@pytest.mark.parametrize(
    "allocation, expected",
    [
        ("ag-only", (0.2, 0.0)),
        ("nonag-only", (0.0, 0.15)),
        ("symmetric", (0.15, 0.15)),
    ],
)
def test_allocations(allocation, expected):
    scenario = allocation_scenarios(0.2, allocation, 0.75)
    assert (scenario.xi_f, scenario.xi_c) == pytest.approx(expected)
    assert scenario.name == "%s@0.2" % allocation


def test_invalid_allocations():
    assert set(ALLOCATIONS) == {"ag-only", "symmetric", "nonag-only"}
    with pytest.raises(ConfigError):
        allocation_scenarios(0.2, "everywhere", 0.75)
    with pytest.raises(ConfigError):
        allocation_scenarios(0.2, "symmetric", 1.5)
    with pytest.raises(ConfigError):
        allocation_scenarios(1.0, "ag-only", 0.75)


@pytest.mark.slow
def test_sweep_records_failures_and_zero_losses(small_options):
    solver = SteadyStateSolver.from_config(small_options)
    base = solver.solve(ClimateScenario.named("no-damage"))
    panel = sweep_allocation(
        solver, losses=[0.0, 0.15, 0.99], allocations=["ag-only", "nonag-only"], workers=1, base=base
    )
    assert len(panel) == 6
    assert list(panel.columns[:5]) == ["allocation", "loss", "xi_f", "xi_c", "status"]
    zero = panel[panel["loss"] == 0.0]
    assert list(zero["status"]) == ["ok", "ok"]
    for k in SWEEP_INDICATORS:
        assert np.allclose(zero["d_" + k], 0.0, atol=1e-12)
    failed = panel[(panel["allocation"] == "ag-only") & (panel["loss"] == 0.99)].iloc[0]
    assert failed["status"] == "failed"
    assert failed["error"].startswith("SubsistenceError")
    assert np.isnan(failed["wealth_gini"])
    moderate = panel[(panel["allocation"] == "ag-only") & (panel["loss"] == 0.15)].iloc[0]
    assert moderate["xi_f"] == 0.15 and moderate["status"] == "ok"
    with pytest.raises(ConfigError):
        sweep_allocation(solver, losses=[1.0], base=base)
