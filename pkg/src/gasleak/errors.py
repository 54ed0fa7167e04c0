"""Exception hierarchy shared by every module of the package."""


class GasLeakError(Exception):
    """Base class for all package errors."""


class ValidationError(GasLeakError, ValueError):
    """Input values violate a documented invariant."""


class UnitError(ValidationError):
    """A physical constant that must be positive is not."""


class GeometryError(ValidationError):
    """Positions or lengths are inconsistent with the line layout."""


class ThresholdError(ValidationError):
    """The compressor ratio limit does not exceed one."""


class OnConnectorError(GeometryError):
    """The leak sits exactly on a connector and the tie-break policy rejects it."""


class DomainError(GasLeakError, ValueError):
    """A point (x, t) lies outside the region where a formula applies."""


class NumericalError(GasLeakError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class TruncationError(NumericalError):
    """A modal series did not meet its tail bound within ``n_max`` terms."""


class StabilityError(NumericalError):
    """An explicit-leaning time step exceeds the stability bound."""


class GridError(NumericalError):
    """A finite-difference grid cannot represent the requested geometry."""


class AlreadyViolated(NumericalError):
    """The inlet pressure already exceeds the compressor limit at closure."""


class NoRoot(NumericalError):
    """The inlet pressure never reaches the compressor limit within the horizon."""
