"""Exception hierarchy shared by all modules."""


class ApproxPupilError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(ApproxPupilError, ValueError):
    """Invalid adder, threshold or pipeline configuration."""


class ImageSizeError(ApproxPupilError, ValueError):
    pass


class RangeError(ApproxPupilError, ValueError):
    """A raster value does not fit in the declared word width."""


class DimensionMismatchError(ApproxPupilError, ValueError):
    pass


class NoPupilError(ApproxPupilError):
    """Raised when segmentation finds no pupil region or boundary."""


class SpecError(ConfigurationError):
    """Synthetic eye geometry violates its invariants."""


class PGMParseError(ApproxPupilError):
    """Malformed PGM data. ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class PGMFormatError(PGMParseError):
    """Well-formed but unsupported PGM variant (ASCII P2, maxval != 255)."""
