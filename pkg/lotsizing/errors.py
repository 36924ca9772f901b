"""
Exception hierarchy for the lot-sizing toolkit.
"""


class LotSizingError(Exception):
    """Base class for every error raised by the library."""


class InstanceError(LotSizingError, ValueError):
    """An instance file or instance payload could not be accepted."""


class InstanceParseError(InstanceError):
    """Malformed instance document (bad JSON, missing or mistyped field)."""


class InstanceDimensionError(InstanceError):
    """Declared sizes disagree with the cost vectors or the demand matrix."""


class InstanceValidationError(InstanceError):
    """Values out of range: negative or non-finite data, epsilon outside [0, 1)."""


class CutSpecError(LotSizingError, ValueError):
    """A cut specification violates the rules of its family."""


class ModelMismatchError(LotSizingError):
    """A cut references a variable kind the target model does not own."""


class NumericalFailureError(LotSizingError):
    """The LP engine gave up: iteration cap reached or singular basis."""


class OracleGuardError(LotSizingError):
    """An enumeration oracle refused an instance that is too large."""
