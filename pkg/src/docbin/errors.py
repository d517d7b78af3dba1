"""Exception types shared across docbin."""


class DocbinError(Exception):
    """Base class for all docbin errors."""


class ShapeError(DocbinError, ValueError):
    """Array dimensions do not match what an operation requires."""


class DomainError(DocbinError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericError(DocbinError, ArithmeticError):
    """A computation produced a non-finite value."""


class DecodeError(DocbinError, ValueError):
    """An encoded image is malformed or truncated.

    Parameters
    ----------
    message : str
        Human readable description.
    offset : int, optional
        Byte offset in the input at which decoding failed.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedFormatError(DocbinError, ValueError):
    """A well-formed image uses a feature docbin does not support."""


class ExternalBinarizerError(DocbinError, RuntimeError):
    """An external binarizer command failed or produced no output."""
