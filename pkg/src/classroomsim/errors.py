"""Exception hierarchy for the classroomsim pipeline.

Three broad families map onto CLI exit codes: configuration problems
(exit 2), data problems (exit 3), and verification failures (exit 4).
"""


class ClassroomSimError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(ClassroomSimError):
    """Invalid configuration, geometry, or parameter values (exit code 2)."""


class DataError(ClassroomSimError):
    """Invalid or missing input data at run time (exit code 3)."""


# --- audio I/O ---------------------------------------------------------

class MissingFileError(DataError):
    pass


class UnsupportedEncodingError(DataError):
    pass


class CorruptHeaderError(DataError):
    pass


class IoFailureError(DataError):
    pass


class InvalidBufferError(DataError):
    pass


class InvalidRateError(ConfigError):
    pass


class EmptyBufferError(DataError):
    pass


class ClippingWarning(UserWarning):
    """Samples were saturated while encoding to 16-bit PCM."""


# --- room model ---------------------------------------------------------

class InvalidDimensionError(ConfigError):
    pass


class InvalidMaterialError(ConfigError):
    pass


class UnknownMaterialError(ConfigError):
    pass


class FurnitureOutOfBoundsError(ConfigError):
    pass


class ZeroAbsorptionError(ConfigError):
    pass


# --- impulse-response engine -------------------------------------------

class SourceOutsideRoomError(ConfigError):
    pass


class ListenerOutsideRoomError(ConfigError):
    pass


class DegenerateSegmentError(ConfigError):
    pass


class NoDecayError(DataError):
    pass


class InsufficientRangeError(DataError):
    pass


# --- scene renderer -----------------------------------------------------

class EmptyPoolError(ConfigError):
    pass


class UnreadablePoolFileError(DataError):
    pass


class OutOfMemoryGuardError(ConfigError):
    pass


# --- corpus pipeline ----------------------------------------------------

class EmptyChildPoolError(DataError):
    pass


class OverlapExceedsUtteranceError(DataError):
    pass


class SilentSpeechError(DataError):
    pass


class SilentNoiseError(DataError):
    pass


class TooFewGroupsError(DataError):
    pass


# --- metrics ------------------------------------------------------------

class LengthMismatchError(DataError):
    pass


class ZeroReferenceError(DataError):
    pass


class AllEmptyReferencesError(DataError):
    pass


class IdMismatchError(DataError):
    pass


# --- fixtures -----------------------------------------------------------

class InvalidSpecError(ConfigError):
    pass


# --- verification -------------------------------------------------------

class VerificationFailedError(ClassroomSimError):
    """A reproducibility or SNR check failed (exit code 4)."""
