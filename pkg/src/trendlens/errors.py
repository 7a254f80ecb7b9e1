"""Error taxonomy shared across the library and the command line."""


class TrendlensError(Exception):
    """Base class for analysis failures."""


class ConfigError(TrendlensError):
    """Bad configuration: missing files, invalid flags or schema."""


class DataError(TrendlensError):
    """Input data unusable for the requested analysis."""


class NumericalError(TrendlensError):
    """An estimator failed to produce a stable result."""
