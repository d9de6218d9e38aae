class ConeQuantileError(Exception):
    """Base class for library errors."""


class InvalidDirectionError(ConeQuantileError, ValueError):
    """A direction is zero or lies outside the dual cone."""


class DegenerateConeError(ConeQuantileError):
    """The cone is the whole space, so its dual is ``{0}``."""


class UnsupportedDimensionError(ConeQuantileError):
    """An operation is not available in the requested dimension."""


class ConfigurationError(ConeQuantileError, ValueError):
    """Invalid run parameters (sample sizes, grids, file contents)."""
