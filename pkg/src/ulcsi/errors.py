"""Exception hierarchy shared by every stage of the pipeline."""


class UlcsiError(Exception):
    """Base class for all errors raised by this package."""


class RejectedInputError(UlcsiError, ValueError):
    """An argument is outside the domain an operation accepts."""


class FormatError(UlcsiError, ValueError):
    """A byte stream does not follow the trace/lane layout.

    ``offset`` is the byte position where parsing gave up, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedVersionError(FormatError):
    pass


class NumericalError(UlcsiError, ArithmeticError):
    """Base for failures that come from the data rather than the caller."""


class DegenerateInputError(NumericalError):
    """Zero-variance or otherwise uninformative series."""


class ConditioningError(NumericalError):
    """A normal-equation system is singular or too ill-conditioned to solve."""
