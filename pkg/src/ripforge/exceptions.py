"""Exception hierarchy shared across the package.

``ConfigError`` maps to CLI exit code 2, ``NumericalError`` (and subclasses)
to exit code 3.
"""


class RipForgeError(Exception):
    """Base class for all package errors."""


class ConfigError(RipForgeError):
    """Invalid configuration, arguments, or input files."""


class DimensionError(ConfigError):
    """Operands with incompatible or invalid shapes."""


class ValidationError(ConfigError):
    """Value-level contract violation (non-finite entries, bad ranges)."""


class MatrixFormatError(ConfigError):
    """Malformed RFMX matrix file. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ImageFormatError(ConfigError):
    """Malformed image file. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class NumericalError(RipForgeError):
    """Numerical failure that aborts a computation."""


class SymmetryError(NumericalError):
    """Matrix expected to be symmetric is not (within tolerance)."""


class RankError(NumericalError):
    """Rank precondition violated. Carries the measured ranks when relevant."""

    def __init__(self, message: str, rank_left: int | None = None,
                 rank_right: int | None = None):
        super().__init__(message)
        self.rank_left = rank_left
        self.rank_right = rank_right


class SingularPencilError(NumericalError):
    """Sylvester equation PX + XQ + C = 0 with overlapping spectra of P, -Q."""


class ConditioningError(NumericalError):
    """A matrix that must be inverted is too ill-conditioned."""


class TightFrameError(NumericalError):
    """Dictionary expected to be a tight frame is not. Carries the defect."""

    def __init__(self, message: str, defect: float | None = None):
        super().__init__(message)
        self.defect = defect


class LevelError(ConfigError):
    """Requested wavelet level does not fit the signal length."""


class StageError(NumericalError):
    """Failure inside a named pipeline stage; wraps the original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
