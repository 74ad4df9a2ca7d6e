"""
Errors raised by the pulse synthesis library.

All of them derive from PulseSynthesisError so callers (the management
commands in particular) can catch library failures in one place.
"""


class PulseSynthesisError(Exception):
    """Base class for every error raised by the synthesis apps."""


class NotUnitary(PulseSynthesisError):
    pass


class ShapeMismatch(PulseSynthesisError):
    pass


class DimensionTooSmall(PulseSynthesisError):
    pass


class NotUnit(PulseSynthesisError):
    pass


class DimMismatch(PulseSynthesisError):
    pass


class BadIndex(PulseSynthesisError):
    pass


class WrongFamily(PulseSynthesisError):
    pass


class NonpositiveAmplitude(PulseSynthesisError):
    pass


class NonpositiveLambda(PulseSynthesisError):
    pass


class NonCommutingStep(PulseSynthesisError):
    """Concurrent pulses must be Z-type on distinct levels."""


class DeflationFailure(PulseSynthesisError):
    """A deflation stage did not map its eigenvector onto a basis state."""


class ScheduleFormatError(PulseSynthesisError):
    """A schedule, state or matrix file could not be parsed."""
