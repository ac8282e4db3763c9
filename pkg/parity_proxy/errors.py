"""Exceptions raised by parity-proxy."""

from typing import Optional


class ParityProxyError(Exception):
    """Base class for every error raised by this library."""


class UnphysicalMomentsError(ParityProxyError, ValueError):
    """Moments violate the uncertainty bound or leave a non-positive radicand."""


class DegenerateLocalOscillatorError(ParityProxyError, ValueError):
    """A live local oscillator was required but |beta| is zero or inconsistent."""


class InconsistentInputsError(ParityProxyError, ValueError):
    """Measured inputs cannot come from one physical state."""


class ModeIndexError(ParityProxyError, IndexError):
    """A mode index lies outside the modes of a transform or state."""


class DimensionMismatchError(ParityProxyError, ValueError):
    """Transform and state (or two transforms) act on different mode counts."""


class UndefinedSensitivityError(ParityProxyError, ValueError):
    """The signal slope vanishes, so no phase sensitivity can be quoted."""


class ConfigError(ParityProxyError, ValueError):
    """An experiment configuration failed validation."""


class CutoffTooSmallError(ParityProxyError, ValueError):
    """Truncated Fock space lost more probability than the tail budget allows."""

    def __init__(
        self,
        message: str,
        *,
        cutoff: Optional[int] = None,
        suggested: Optional[int] = None,
    ) -> None:
        if suggested is not None:
            message = f"{message} (try cutoff >= {suggested})"
        super().__init__(message)
        self.cutoff = cutoff
        self.suggested = suggested
