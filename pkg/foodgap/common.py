import os
import json
import hashlib

# this is the subdirectory name (with respect to the path of this file) where
# the default datafiles are stored
DATA_DIR = "data"
DATA_PATH = os.path.join(os.path.dirname(__file__), DATA_DIR)


__all__ = [
    "DATA_PATH",
    "FoodgapBase",
    "get_datafile",
    "config_hash",
    "FoodgapError",
    "ConfigError",
    "SubsistenceError",
    "ConvergenceError",
    "BracketError",
    "GridError",
    "PrimitiveMismatchError",
    "InvariantError",
]


class FoodgapBase():
    """abstract class with the basic functionality that all configurable
    foodgap classes share.
    A class method provides access to the class init defaults by returning the
    class `__init__` signature with default values as a dictionary
    `{arg:default_value}`.

    Inheriting classes should not run the base class __init__() method, but
    they must implement the `_stop_at_defaults` argument (as the last one) and
    return right after storing the arguments when it is set, so that
    `get_defaults` never triggers validation or derived computations.
    >>> class Something(FoodgapBase):
    ...     def __init__(self, tol=1e-9, _stop_at_defaults=False):
    ...         self.tol = tol
    ...         if _stop_at_defaults:
    ...             return
    ...         self._validate()
    ...
    >>> opts = Something.get_defaults()
    >>> opts["tol"] = 1e-6
    >>> s = Something(**opts)
    """

    def __init__(self, _stop_at_defaults: bool = False):
        if _stop_at_defaults:
            return

    @classmethod
    def get_defaults(cls):
        """method to return the default values of init options"""
        return cls(_stop_at_defaults=True).__dict__.copy()

    def get_options(self):
        """return the current init options (public attributes only)"""
        return {k: v for k, v in self.__dict__.items() if not k.startswith("_")}

    @classmethod
    def from_options(cls, options: dict):
        """build an instance from a (possibly partial) options dict,
        refusing keywords the class does not know"""
        defaults = cls.get_defaults()
        unknown = sorted(set(options) - set(defaults))
        if unknown:
            raise ConfigError(
                "*** ERROR *** unrecognized option(s) %s for [ %s ], allowed: %s"
                % (unknown, cls.__name__, sorted(defaults))
            )
        defaults.update(options)
        return cls(**defaults)

    def __repr__(self):
        opts = ", ".join("%s=%r" % (k, v) for k, v in self.get_options().items())
        return "%s(%s)" % (self.__class__.__name__, opts)


def get_datafile(fname: str) -> str:
    """helper function to provide the full-path of data files available in
    the foodgap default location ("foodgap/data", defined by DATA_DIR)"""
    fullpath = os.path.join(DATA_PATH, fname)
    if not os.path.exists(fullpath):
        msg = (
            "ERROR: the specified filename [%s] "
            "does not exist in the data "
            "directory [%s]" % (fname, DATA_PATH)
        )
        raise ValueError(msg)
    return fullpath


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON dump of a config dict"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class FoodgapError(Exception):
    """mixin carried by every foodgap exception: an exit code for the
    command line and a context dict for machine-readable error records"""

    exit_code = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def with_context(self, **context):
        """attach extra context (e.g. the equilibrium iterate) and return self"""
        self.context.update(context)
        return self

    def as_record(self) -> dict:
        return {
            "error": self.__class__.__name__,
            "exit_code": self.exit_code,
            "message": self.message,
            "context": {k: _jsonable(v) for k, v in self.context.items()},
        }

    def __str__(self):
        if not self.context:
            return self.message
        ctx = ", ".join("%s=%s" % (k, v) for k, v in sorted(self.context.items()))
        return "%s [ %s ]" % (self.message, ctx)


class ConfigError(FoodgapError, ValueError):
    exit_code = 2


class SubsistenceError(FoodgapError, ValueError):
    """expenditures at or below the cost of subsistence food"""

    exit_code = 3


class ConvergenceError(FoodgapError, RuntimeError):
    exit_code = 4


class BracketError(FoodgapError, RuntimeError):
    exit_code = 5


class GridError(FoodgapError, RuntimeError):
    exit_code = 6


class PrimitiveMismatchError(FoodgapError, ValueError):
    """two steady states built from different preferences/income/grid"""

    exit_code = 7


class InvariantError(FoodgapError, RuntimeError):
    exit_code = 8


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)
