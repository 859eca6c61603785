"""Exception types shared across the toolkit."""


class EegfuzzError(Exception):
    """Base class for all toolkit errors."""


class FormatError(EegfuzzError):
    """Input file content cannot be parsed."""


class EmptyInputError(EegfuzzError):
    """An input that must be nonempty was empty."""


class ParameterError(EegfuzzError, ValueError):
    """A parameter value is outside its valid domain."""


class InsufficientDataError(EegfuzzError, ValueError):
    """Sequence too short for the requested computation."""


class ShapeError(EegfuzzError, ValueError):
    """Array/structure dimensions do not match what an operation expects."""


class ConfigurationError(EegfuzzError):
    """Run configuration is inconsistent or references missing pieces."""


class StratificationError(EegfuzzError):
    """A class is too small to be spread over the requested folds."""
