import os
import json
import logging
import tempfile

import numpy as np
import pandas as pd

from .common import FoodgapBase
from .common import ConfigError

""" this file contains the writers and readers of everything that leaves or
enters a run:
    - JSON config files
    - CSV tables, each carrying a header that names units and config hash
    - JSON steady-state snapshots
    - machine-readable error records

files are written to a temporary name first and moved in place, so a failed
run never leaves a partial file behind
"""

logger = logging.getLogger(__name__)

VALID_FORMATS = ["csv", "json", "svg"]
SNAPSHOT_VERSION = 1
SNAPSHOT_INDENT = 1


def _atomic_write(fname: str, text: str) -> None:
    dirname = os.path.dirname(os.path.abspath(fname))
    os.makedirs(dirname, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp_", suffix=os.path.basename(fname))
    try:
        with os.fdopen(fd, "w", newline="\n") as fp:
            fp.write(text)
        os.replace(tmp, fname)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _json_text(data, indent: int) -> str:
    return json.dumps(data, indent=indent, sort_keys=True) + "\n"


def read_config(fname: str) -> dict:
    """read a JSON config file"""
    if not os.path.exists(fname):
        raise ConfigError("*** ERROR *** config file [ %s ] does not exist" % fname)
    try:
        with open(fname) as fp:
            config = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "*** ERROR *** config file [ %s ] is not valid JSON" % fname,
            line=exc.lineno, column=exc.colno,
        )
    if not isinstance(config, dict):
        raise ConfigError("*** ERROR *** config file [ %s ] must hold a JSON object" % fname)
    return config


def write_config(fname: str, config: dict) -> None:
    _atomic_write(fname, json.dumps(config, indent=4, sort_keys=True) + "\n")


def table_text(frame: pd.DataFrame, title: str, units: str, config_hash: str) -> str:
    """CSV text preceded by '#' header lines; floats in repr-exact form"""
    header = [
        "# foodgap table: %s" % title,
        "# units: %s" % units,
        "# config_hash: %s" % config_hash,
    ]
    body = frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    return "\n".join(header) + "\n" + body


def read_table(fname: str) -> pd.DataFrame:
    return pd.read_csv(fname, comment="#")


def read_table_header(fname: str) -> dict:
    """the '# key: value' header lines of an emitted table"""
    header = {}
    with open(fname) as fp:
        for line in fp:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
    return header


class ReportStorage(FoodgapBase):
    """write the products of a run in `output_dir`

    >>> rs = ReportStorage(output_dir="results", config_hash=h)
    >>> rs.write_table("summary", frame, units="model units")
    """

    def __init__(
        self,
        output_dir: str = ".",
        overwrite: bool = False,
        config_hash: str = "",
        _stop_at_defaults: bool = False,
    ):
        self.output_dir = output_dir
        self.overwrite = overwrite
        self.config_hash = config_hash
        if _stop_at_defaults:
            return
        self.written = []

    def generate_filename(self, basename: str, ftype: str = "csv") -> str:
        """full path of an output file; refused when it exists and
        overwriting is off"""
        if ftype not in VALID_FORMATS:
            raise ValueError(
                "Invalid output file format: current(%s), accepted (%s)"
                % (ftype, ",".join(VALID_FORMATS))
            )
        fullpath = os.path.join(self.output_dir, "%s.%s" % (basename, ftype))
        if os.path.exists(fullpath) and not self.overwrite:
            raise FileExistsError(
                "Filename [%s] already exists (use --overwrite to replace it)." % fullpath
            )
        return fullpath

    def check_available(self, basenames) -> None:
        """raise before any solve if one of the outputs would be refused"""
        for basename in basenames:
            name, _, ftype = basename.rpartition(".")
            self.generate_filename(name, ftype)

    def write_table(self, basename: str, frame: pd.DataFrame, units: str, title: str = None) -> str:
        fname = self.generate_filename(basename, "csv")
        _atomic_write(fname, table_text(frame, title or basename, units, self.config_hash))
        self.written.append(fname)
        logger.info("written table [ %s ]", fname)
        return fname

    def write_json(self, basename: str, data: dict, indent: int = 2) -> str:
        fname = self.generate_filename(basename, "json")
        _atomic_write(fname, _json_text(data, indent))
        self.written.append(fname)
        logger.info("written [ %s ]", fname)
        return fname

    def write_error(self, error) -> str:
        """error.json for a failed run; always overwritten"""
        os.makedirs(self.output_dir, exist_ok=True)
        fname = os.path.join(self.output_dir, "error.json")
        record = error.as_record()
        record["config_hash"] = self.config_hash
        _atomic_write(fname, json.dumps(record, indent=2, sort_keys=True) + "\n")
        return fname


def _matrix(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def snapshot(state) -> dict:
    """plain-dict image of a SteadyState: scalar diagnostics, grids and
    matrices as row-major nested lists"""
    diagnostics = {k: v for k, v in state.diagnostics.items() if k != "certificate"}
    return {
        "version": SNAPSHOT_VERSION,
        "scenario": state.scenario.get_options(),
        "preferences": state.prefs.get_options(),
        "technology": state.base_tech.get_options(),
        "summary": state.summary(),
        "diagnostics": diagnostics,
        "certificate": state.diagnostics.get("certificate", {}),
        "iterates": state.iterates,
        "asset_grid": _matrix(state.grid.nodes),
        "income_levels": _matrix(state.income.levels),
        "income_transition": _matrix(state.income.transition),
        "savings": _matrix(state.policy.savings),
        "expenditures": _matrix(state.policy.expenditures),
        "mass": _matrix(state.dist.mass),
    }


def load_snapshot(fname: str) -> dict:
    """snapshot dict with the matrices turned back into numpy arrays"""
    with open(fname) as fp:
        data = json.load(fp)
    if data.get("version") != SNAPSHOT_VERSION:
        raise ValueError(
            "*** ERROR *** snapshot [ %s ] has version %s, expected %d"
            % (fname, data.get("version"), SNAPSHOT_VERSION)
        )
    for key in ("asset_grid", "income_levels", "income_transition", "savings", "expenditures", "mass"):
        data[key] = np.array(data[key], dtype=float)
    return data
