"""Exception types raised across the package."""


class DomainError(ValueError):
    """Input lies outside the admissible region of an operation."""


class UnsupportedSystemError(ValueError):
    """Operation is only defined for the constant-force preset."""


class WeightOverflowError(OverflowError):
    """The exponential weight exp(...) left the double-precision range."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InversionError(RuntimeError):
    """The momentum -> velocity root solve failed."""


class ConfigError(ValueError):
    """Malformed run configuration."""

    def __init__(self, message, line=None, key=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.key = key
