import numpy as np
import pandas as pd
import pytest

from foodgap.common import BracketError
from foodgap.common import ConfigError
from foodgap.preferences import Preferences
from foodgap.production import ClimateScenario
from foodgap.core import SteadyStateSolver
from foodgap.calibration import ExpenditureSegments
from foodgap.calibration import estimate_preferences
from foodgap.calibration import calibrate_spread
from foodgap.calibration import calibration_report
from foodgap.calibration import monotonicity_scan

SMALL = {
    "income": {"values": {"n_states": 3, "n_types": 1, "floor": 0.0}},
    "grid": {"values": {"size": 60, "a_max_multiple": 30.0, "tail_mass_tol": 1e-4}},
    "egm": {"values": {"tol": 1e-8}},
    "solver": {"values": {"dist_tol": 1e-11, "clearing_tol": 1e-5}},
    "general": {"values": {"workers": 1}},
}


def test_round_trip_on_model_data():
    truth = Preferences(phi=0.8196, f_bar=0.0564)
    data = ExpenditureSegments.synthetic(truth, [0.15, 0.4, 1.0, 2.5, 6.0], weights=[5, 4, 3, 2, 1])
    est = estimate_preferences(data)
    assert est.phi == pytest.approx(truth.phi, abs=1e-10)
    assert est.f_bar == pytest.approx(truth.f_bar, abs=1e-10)
    assert est.rsquared == pytest.approx(1.0, abs=1e-10)
    assert est.nobs == 5


def test_homothetic_data():
    data = ExpenditureSegments.synthetic(Preferences(phi=0.7, f_bar=0.0), [0.5, 1.0, 4.0])
    est = estimate_preferences(data, weighted=False)
    assert est.phi == pytest.approx(0.7, abs=1e-10)
    assert est.f_bar == pytest.approx(0.0, abs=1e-10)


def test_packaged_segments_and_unit_conversion():
    data = ExpenditureSegments.read()
    assert len(data) == 4
    est = estimate_preferences(data, mean_expenditure=0.5 / 0.0564)
    assert est.phi == pytest.approx(0.8196, abs=1e-6)
    assert est.f_bar == pytest.approx(0.0564, abs=1e-6)
    report = calibration_report(est)
    assert list(report.columns) == ["quantity", "value", "std_error", "target"]
    assert report.loc[report["quantity"] == "phi", "value"].iloc[0] == est.phi


def test_invalid_segments(tmp_path):
    with pytest.raises(ConfigError):
        estimate_preferences(ExpenditureSegments.synthetic(Preferences(), [1.0, 1.0]))
    frame = ExpenditureSegments.read().frame.copy()
    frame.loc[0, "upper"] = 3.5
    with pytest.raises(ConfigError):
        ExpenditureSegments(frame)
    with pytest.raises(ConfigError):
        ExpenditureSegments(frame.drop(columns=["weight"]))
    bad = ExpenditureSegments.read().frame.copy()
    bad.loc[1, "food_share"] = 1.2
    with pytest.raises(ConfigError):
        ExpenditureSegments(bad)
    with pytest.raises(ConfigError):
        ExpenditureSegments.read(str(tmp_path / "missing.csv"))
    pd.DataFrame({"segment": ["a"]}).to_csv(tmp_path / "short.csv", index=False)
    with pytest.raises(ConfigError):
        ExpenditureSegments.read(str(tmp_path / "short.csv"))


def test_spread_target_validation():
    with pytest.raises(ConfigError):
        calibrate_spread(0.5)
    with pytest.raises(ConfigError):
        calibrate_spread(5.0, options=SMALL, parameter="sigma", bracket=(0.5, 0.1))
    with pytest.raises(ConfigError):
        calibrate_spread(5.0, options=SMALL, parameter="rho")


@pytest.mark.slow
def test_unreachable_target_reports_the_achieved_range():
    with pytest.raises(BracketError) as info:
        calibrate_spread(1.0, options=SMALL, parameter="sigma", bracket=(0.1, 0.4))
    context = info.value.context
    assert 1.0 < context["achieved_lo"] < context["achieved_hi"]


@pytest.mark.slow
def test_spread_increases_consumption_inequality():
    scan = monotonicity_scan(SMALL, values=(0.1, 0.3, 0.5), parameter="sigma")
    assert np.all(np.diff(scan["expenditure_8020"].values) > 0.0)


@pytest.mark.slow
def test_calibrated_spread_hits_the_target():
    scan = monotonicity_scan(SMALL, values=(0.2, 0.4), parameter="sigma")
    target = float(scan["expenditure_8020"].mean())
    result = calibrate_spread(target, options=SMALL, parameter="sigma", bracket=(0.2, 0.4))
    assert result.achieved == pytest.approx(target, rel=0.005)
    assert result.parameter == "sigma"
    assert 0.2 < result.value < 0.4
    report = calibration_report(spread=result)
    assert report["target"].iloc[-1] == target
    assert report["quantity"].iloc[-2] == "sigma"


@pytest.mark.slow
def test_type_spread_raises_consumption_inequality():
    options = {
        "income": {"values": {"n_states": 3}},
        "grid": {"values": {"size": 100}},
        "solver": {"values": {"dist_tol": 1e-11, "clearing_tol": 1e-5}},
    }
    scan = monotonicity_scan(options, values=(2.0, 6.0, 10.0))
    assert list(scan.columns) == ["type_spread", "expenditure_8020"]
    assert np.all(np.diff(scan["expenditure_8020"].values) > 0.0)


@pytest.mark.slow
def test_default_economy_calibrates_to_the_survey_ratio():
    result = calibrate_spread(21.0)
    assert result.parameter == "type_spread"
    assert 20.5 <= result.achieved <= 21.5
    state = SteadyStateSolver.from_config(
        {"income": {"values": {"type_spread": result.value}}}
    ).solve(ClimateScenario.named("no-damage"))
    assert state.indicators["expenditure_8020"] == pytest.approx(result.achieved, rel=1e-9)
    # the poorest quintile lives off its labor income alone
    assert state.indicators["wealthless_share"] >= 0.2
