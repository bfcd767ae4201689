"""Exception types raised across the package."""


class NeuroEdaError(Exception):
    """Base class for all package errors."""


class DimensionError(NeuroEdaError, ValueError):
    """Genotype length does not match what an operation expects."""


class StateError(NeuroEdaError, RuntimeError):
    """An operation was called on an object in the wrong state."""


class ParseError(NeuroEdaError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(NeuroEdaError, FloatingPointError):
    """Training produced a non-finite loss or parameter."""


class ConfigError(NeuroEdaError, ValueError):
    pass


class ResourceError(NeuroEdaError, MemoryError):
    pass
