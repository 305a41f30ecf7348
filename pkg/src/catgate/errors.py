"""Exception hierarchy. Every error raised by the package derives from CatGateError."""

from __future__ import annotations


class CatGateError(Exception):
    pass


class DimensionError(CatGateError, ValueError):
    pass


class InputError(CatGateError, ValueError):
    pass


class TruncationError(CatGateError, ValueError):
    def __init__(self, message: str, required_n_trunc: int | None = None):
        super().__init__(message)
        self.required_n_trunc = required_n_trunc


class DegenerateEncodingError(CatGateError, ValueError):
    pass


class ConfigurationError(CatGateError, ValueError):
    """Physical parameters violate a sign convention or constraint."""


class SingularChiError(ConfigurationError):
    pass


class ConstraintError(ConfigurationError):
    """The Stark-cancellation constraint for the stage-2 coupling has no real solution."""


class ConfigParseError(CatGateError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line


class IntegratorAccuracyError(CatGateError, ArithmeticError):
    pass


class SubspaceError(CatGateError, ValueError):
    pass


class NumericalValidityError(CatGateError, ArithmeticError):
    pass
