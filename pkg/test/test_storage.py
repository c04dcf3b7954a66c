import json
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from foodgap.common import ConfigError
from foodgap.common import ConvergenceError
from foodgap.preferences import Preferences
from foodgap.production import Technology
from foodgap.production import ClimateScenario
from foodgap.household.grid import AssetGrid
from foodgap.storage import ReportStorage
from foodgap.storage import read_config
from foodgap.storage import write_config
from foodgap.storage import table_text
from foodgap.storage import read_table
from foodgap.storage import read_table_header
from foodgap.storage import snapshot
from foodgap.storage import load_snapshot
from foodgap.storage import SNAPSHOT_INDENT


def test_tables_carry_units_and_exact_floats(tmp_path):
    frame = pd.DataFrame({"decile": [1, 2], "value": [0.1, 1.0 / 3.0]})
    storage = ReportStorage(output_dir=str(tmp_path), config_hash="abc123")
    fname = storage.write_table("deciles", frame, units="model units")
    header = read_table_header(fname)
    assert header["foodgap table"] == "deciles"
    assert header["units"] == "model units"
    assert header["config_hash"] == "abc123"
    back = read_table(fname)
    assert back["value"].tolist() == frame["value"].tolist()
    assert storage.written == [fname]


def test_table_text_is_stable():
    frame = pd.DataFrame({"x": [0.5]})
    assert table_text(frame, "t", "u", "h") == table_text(frame, "t", "u", "h")
    assert table_text(frame, "t", "u", "h").endswith("x\n0.5\n")


def test_existing_outputs_are_not_overwritten(tmp_path):
    (tmp_path / "summary.csv").write_text("old")
    storage = ReportStorage(output_dir=str(tmp_path))
    with pytest.raises(FileExistsError):
        storage.check_available(["summary.csv"])
    with pytest.raises(ValueError):
        storage.generate_filename("summary", "xlsx")
    ReportStorage(output_dir=str(tmp_path), overwrite=True).write_table("summary", pd.DataFrame({"a": [1]}), "-")
    assert read_table(str(tmp_path / "summary.csv"))["a"].tolist() == [1]


def test_error_record(tmp_path):
    storage = ReportStorage(output_dir=str(tmp_path / "out"), config_hash="h")
    error = ConvergenceError("*** ERROR *** EGM did not converge", max_iter=10).with_context(r_net=0.01, iterate=3)
    fname = storage.write_error(error)
    record = json.loads(open(fname).read())
    assert record["exit_code"] == 4
    assert record["error"] == "ConvergenceError"
    assert record["context"] == {"max_iter": 10, "r_net": 0.01, "iterate": 3}
    assert record["config_hash"] == "h"


def test_config_files(tmp_path):
    fname = str(tmp_path / "config.json")
    write_config(fname, {"grid": {"size": 50}})
    assert read_config(fname) == {"grid": {"size": 50}}
    with pytest.raises(ConfigError):
        read_config(str(tmp_path / "absent.json"))
    (tmp_path / "broken.json").write_text("{ grid: ")
    with pytest.raises(ConfigError):
        read_config(str(tmp_path / "broken.json"))


def test_snapshot(tmp_path):
    grid = AssetGrid([0.0, 1.0, 3.0])
    mass = np.array([[0.2, 0.1], [0.3, 0.1], [0.2, 0.1]])
    state = SimpleNamespace(
        scenario=ClimateScenario.named("baseline"),
        prefs=Preferences(),
        base_tech=Technology(),
        summary=lambda: {"scenario": "baseline", "r_net": 0.0123},
        diagnostics={"clearing_residual": 1e-9, "certificate": {"r_below": 0.01}},
        iterates=[{"r_net": 0.01, "excess": 0.5}],
        grid=grid,
        income=SimpleNamespace(levels=np.array([0.5, 1.5]), transition=np.full((2, 2), 0.5)),
        policy=SimpleNamespace(savings=np.zeros((3, 2)), expenditures=np.ones((3, 2))),
        dist=SimpleNamespace(mass=mass),
    )
    storage = ReportStorage(output_dir=str(tmp_path))
    fname = storage.write_json("snapshot", snapshot(state), indent=SNAPSHOT_INDENT)
    assert storage.written == [fname]
    assert (tmp_path / "snapshot.json").read_text().startswith("{\n \"")
    data = load_snapshot(fname)
    assert data["scenario"] == {"xi_f": 0.25, "xi_c": 0.0, "name": "baseline"}
    assert np.array_equal(data["mass"], mass)
    assert np.array_equal(data["asset_grid"], grid.nodes)
    assert data["certificate"] == {"r_below": 0.01}
    assert "certificate" not in data["diagnostics"]
