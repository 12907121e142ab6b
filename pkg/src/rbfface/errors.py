"""Exception and warning types raised across the package."""


class RbfFaceError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(RbfFaceError, ValueError):
    pass


class DimensionError(RbfFaceError, ValueError):
    pass


class NumericError(RbfFaceError, ArithmeticError):
    pass


class PgmParseError(RbfFaceError, ValueError):
    """Malformed PGM input. ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DatasetError(RbfFaceError):
    pass


class ModelFileError(RbfFaceError):
    pass


class RankDeficientWarning(UserWarning):
    """The least-squares design matrix has effective rank below its column count."""
