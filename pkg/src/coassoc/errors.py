"""Exception types shared across the package."""


class CoassocError(Exception):
    """Base class for all package-specific errors."""


class MalformedInputError(CoassocError, ValueError):
    """An input file could not be parsed (message names row/column)."""


class DimensionError(CoassocError, ValueError):
    """Inputs have inconsistent shapes or lengths."""


class FormatError(CoassocError, ValueError):
    """A serialized artifact has a bad magic, version, or structure."""


class ConfigError(CoassocError, ValueError):
    """A hyperparameter or option is outside its allowed range."""


class NumericError(CoassocError, ArithmeticError):
    """A numeric computation produced NaN/Inf or failed to factorize."""
