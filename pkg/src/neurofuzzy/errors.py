"""Exception types shared across the package.

The CLI maps these onto stable exit codes, so new failure modes should
reuse one of the classes below rather than raising bare ValueErrors.
"""


class NeurofuzzyError(Exception):
    """Base class for all package-specific errors."""


class DataLoadError(NeurofuzzyError):
    """A dataset file could not be parsed or failed validation."""


class SplitError(NeurofuzzyError):
    """A train/test split or fold assignment could not be built."""


class ConfigError(NeurofuzzyError):
    """A run configuration is missing, malformed, or out of bounds."""

class ModelFormatError(NeurofuzzyError):
    """A model file has the wrong kind or format version."""


class NumericError(NeurofuzzyError):
    """A numeric procedure failed (non-finite values, failed solve)."""


class UndefinedKappaError(NumericError):
    """Kappa is undefined because random accuracy equals 1."""
