"""Exception hierarchy shared by all computational layers."""


class ThermoNeutralError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSystem(ThermoNeutralError, ValueError):
    """Input does not describe a valid system (shape, values, adjacency)."""


class NonSquare(InvalidSystem):
    pass


class EmptyRowOrColumn(InvalidSystem):
    pass


class NotPrimitive(InvalidSystem):
    pass


class NoConvergence(ThermoNeutralError, RuntimeError):
    pass


class PositivityViolated(ThermoNeutralError, ArithmeticError):
    pass


class PreconditionViolated(ThermoNeutralError, ValueError):
    """An operation was called outside its domain of validity."""


class TargetOutOfRange(PreconditionViolated):
    pass


class Degenerate(PreconditionViolated):
    pass


class OrbitTooShort(PreconditionViolated):
    pass


class WindowTooLarge(PreconditionViolated):
    pass


class ConfigError(ThermoNeutralError, ValueError):
    """Malformed or inconsistent run configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
