"""
Error types raised by the laboratory.

Parameter and precondition failures are also ``ValueError`` so callers that
only know about builtin exceptions still catch them.
"""


class LabError(Exception):
    """Base class for every error raised by rfimlab."""


class ParameterError(LabError, ValueError):
    """A parameter is outside its admissible range."""


class PreconditionError(LabError, ValueError):
    """An operation was called on inputs violating its precondition."""


class EmptyRegionError(PreconditionError):
    """An operation needing a nonempty vertex set received an empty one."""


class RegionMismatchError(PreconditionError):
    """Two regions that must be nested or equal are not."""


class RegionTooLargeError(PreconditionError):
    """The brute-force oracle was asked to enumerate a region that is too large."""


class FieldMagnitudeError(PreconditionError):
    """A field value is too large for the fixed-point capacity arithmetic."""


class InvariantViolation(LabError):
    """A property that must hold on every sample failed.

    Attributes:
        check (str): Name of the failed check.
        details (dict): Sample coordinates and measured values.
    """

    def __init__(self, check: str, message: str, **details):
        super().__init__(f"[{check}] {message}")
        self.check = check
        self.message = message
        self.details = details

    def __reduce__(self):
        return (_restore_violation, (self.check, self.message, self.details))


class RecordIOError(LabError, OSError):
    """Reading or writing an experiment artifact failed."""


def _restore_violation(check: str, message: str, details: dict) -> InvariantViolation:
    return InvariantViolation(check, message, **details)
