"""Exception hierarchy.

``ValidationError`` subclasses signal bad inputs (CLI exit code 1);
``SolverRuntimeError`` subclasses signal failures while running (exit code 2).
"""


class FastSlowError(Exception):
    """Base class for all package errors."""


class ValidationError(FastSlowError, ValueError):
    pass


class SolverRuntimeError(FastSlowError, RuntimeError):
    pass


class NonPositiveRelaxation(ValidationError):
    pass


class BadEpsilon(ValidationError):
    pass


class BadHorizon(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class BadProfile(ValidationError):
    pass


class BadGrid(ValidationError):
    pass


class BadSolverConfig(ValidationError):
    pass


class DomainTooSmall(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class InsufficientSnapshots(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class NonPositiveData(ValidationError):
    pass


class ConfigError(ValidationError):
    """Raised for malformed experiment definitions."""


class MissingKey(ConfigError):
    def __init__(self, key: str):
        super().__init__(f"missing required key: {key!r}")
        self.key = key


class UnknownKey(ConfigError):
    def __init__(self, key: str, lineno: int | None = None):
        where = f" (line {lineno})" if lineno is not None else ""
        super().__init__(f"unknown key: {key!r}{where}")
        self.key = key
        self.lineno = lineno


class ParseError(ConfigError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CFLViolation(SolverRuntimeError):
    pass


class NonFiniteState(SolverRuntimeError):
    pass


class WriteFailure(SolverRuntimeError):
    pass
